import json

import numpy as np
import pytest

from medium_decoherence.generator import build_generator
from medium_decoherence.young import (
    YoungConfig,
    background,
    crossed_term_feedback,
    feedback_sweep,
    fringe_spacing,
    gaussian_packet,
    local_target_slab,
    mixed_part_comparison,
    pattern,
    position_grid,
    target_profile,
    vacuum_fringes,
    visibility,
    visibility_formula,
    visibility_sweep,
    write_pattern_csv,
    write_visibility_json,
)


def _cfg(im=0.0, **kw):
    return YoungConfig(slit_separation=1.0, screen_distance=20.0, wavenumber=5.0,
                       medium_wavenumber=complex(5.0, im), **kw)


def test_config_checks():
    with pytest.raises(ValueError):
        YoungConfig(1.0, 5.0, 5.0, 5.0)
    with pytest.raises(ValueError):
        YoungConfig(1.0, 20.0, 5.0, -5.0)
    with pytest.raises(ValueError):
        _cfg(screen_points=np.array([0.0, 1.0, 3.0]))
    cfg = YoungConfig.from_index(1.01 + 0.001j, 5.0, slit_separation=1.0, screen_distance=20.0)
    assert cfg.medium_wavenumber == pytest.approx(5.05 + 0.005j)


def test_vacuum_pattern():
    cfg = _cfg()
    I = pattern(cfg)
    assert np.allclose(I, vacuum_fringes(cfg))
    v = visibility(I)
    assert v.background_zero and v.ratio == float("inf")
    assert v.to_json()["ratio"] is None
    assert visibility_formula(0.0) == float("inf")


def test_intensity_normalized():
    for im in (0.0, 0.01, 0.05):
        cfg = _cfg(im)
        assert np.sum(pattern(cfg)) * cfg.spacing == pytest.approx(1.0, abs=1e-12)
        assert np.sum(background(cfg)) * cfg.spacing == pytest.approx(1.0, abs=1e-12)


def test_half_damping_gives_ratio_two():
    x = np.log(2) / 2
    assert visibility_formula(x) == pytest.approx(2.0)
    cfg = _cfg(x / 20.0)
    assert cfg.damping == pytest.approx(0.5)
    assert visibility(pattern(cfg)).ratio == pytest.approx(2.0, rel=0.1)


def test_gain_rejected():
    with pytest.raises(ValueError):
        pattern(_cfg(-0.01))


def test_no_extrema():
    with pytest.raises(ValueError):
        visibility(np.ones(11))
    with pytest.raises(ValueError):
        fringe_spacing(np.linspace(0, 1, 11), np.arange(11.0))


def test_visibility_sweep_within_ten_percent():
    rows = visibility_sweep(_cfg(), np.linspace(0.05, 2.0, 12))
    assert max(r["relative_deviation"] for r in rows) <= 0.1


def test_fringe_spacing():
    cfg = _cfg(0.01)
    measured = fringe_spacing(pattern(cfg), cfg.screen_points)
    assert measured == pytest.approx(cfg.fringe_period, rel=0.01)


def test_output_files(tmp_path):
    cfg = _cfg(0.02)
    I = pattern(cfg)
    write_pattern_csv(tmp_path / "p.csv", cfg, I)
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "x [length],intensity [1/length]" and len(lines) == 2002
    write_visibility_json(tmp_path / "v.json", cfg, visibility(I))
    rec = json.loads((tmp_path / "v.json").read_text())
    assert rec["formula"] == pytest.approx(visibility_formula(0.4))
    vac = _cfg()
    write_visibility_json(tmp_path / "vac.json", vac, visibility(pattern(vac)))
    rec = json.loads((tmp_path / "vac.json").read_text())
    assert rec["formula"] is None and rec["measured"]["background_zero"]


def test_target_profile_compact():
    x = position_grid(10.0, 201)
    g = target_profile(x, 1.0, 0.5)
    assert np.all(g[np.abs(x - 1.0) > 2.0] == 0) and g.max() == 1.0


def test_packets_must_be_normalized():
    x = position_grid(5.0, 21)
    gen = build_generator(local_target_slab(x, [0.0], 0.5, 0.1))
    with pytest.raises(ValueError):
        crossed_term_feedback(np.ones(21), gaussian_packet(x, 0, 1), gen)


def test_crossed_block_vanishes_off_target():
    """A packet sitting wholly outside every target's support sees no
    jump operator, so its crossed block with anything gets no feedback."""
    x = position_grid(10.0, 101)
    slab = local_target_slab(x, [-5.0], 0.5, 0.2)
    phi = gaussian_packet(x, -5.0, 0.5)
    psi = np.where(np.abs(x - 5.0) <= 1.0, 1.0, 0.0).astype(complex)
    psi /= np.linalg.norm(psi)
    fb = crossed_term_feedback(phi, psi, slab)
    assert fb.mixture == 0 and fb.footprint == 0 and fb.total == 0
    assert crossed_term_feedback(phi, phi, slab).total > 0


def test_feedback_decays_with_separation():
    x = position_grid(12.0, 121)
    w, r = 0.5, 0.5
    rows = feedback_sweep(x, [2.0, 4.0, 6.0, 8.0, 10.0], w, r)
    totals = [fb.total for s, fb in rows if s > 2 * (w + r)]
    assert all(b < a for a, b in zip(totals, totals[1:]))
    assert totals[-1] < 1e-6 * rows[0][1].total


def test_mixed_parts_agree_for_separated_packets():
    x = position_grid(8.0, 41)
    slab = local_target_slab(x, np.arange(-4.0, 4.1, 2.0), 0.5, 0.3)
    gen = build_generator(slab)
    phi = np.where(np.abs(x + 5.0) <= 0.5, 1.0, 0.0).astype(complex)
    psi = np.where(np.abs(x - 5.0) <= 0.5, 1.0, 0.0).astype(complex)
    phi /= np.linalg.norm(phi)
    psi /= np.linalg.norm(psi)
    # targets at -4 and 4 reach 2 units; the packets overlap them, but no
    # single target covers both, so the crossed block never feeds back
    assert mixed_part_comparison(phi, psi, gen, 0.5, 0.05) <= 1e-12
