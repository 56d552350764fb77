"""Image-source simulator physics and clean/late split tests."""

import numpy as np
import pytest

from batkit import rir

FS = 16000
C = rir.SPEED_OF_SOUND


class TestSimulate:
    def test_anechoic_single_impulse(self):
        room = rir.RoomSpec((6.0, 4.0, 3.0), 0.0)
        # distance chosen so the delay is an integer number of samples
        d = 48 * C / FS
        h = rir.simulate_rir(room, (1.0, 2.0, 1.5), (1.0 + d, 2.0, 1.5))
        peak = np.argmax(np.abs(h.taps))
        assert peak == 48
        assert h.taps[peak] == pytest.approx(1.0 / (4 * np.pi * d), rel=1e-9)
        # windowed sinc at integer delay leaves only the center tap
        others = np.delete(h.taps, peak)
        assert np.max(np.abs(others)) < 1e-12

    def test_direct_delay_matches_distance(self):
        room = rir.RoomSpec((6.0, 4.0, 3.0), 0.4)
        src, mic = (1.3, 1.1, 1.2), (4.9, 3.2, 1.8)
        h = rir.simulate_rir(room, src, mic)
        d = np.linalg.norm(np.subtract(src, mic))
        assert abs(h.direct_delay * C / FS - d) <= C / FS

    def test_free_field_distance_halving(self):
        room = rir.RoomSpec((40.0, 40.0, 40.0), 0.0)
        d1 = 64 * C / FS
        h1 = rir.simulate_rir(room, (20.0, 20.0, 20.0), (20.0 + d1, 20.0, 20.0))
        h2 = rir.simulate_rir(room, (20.0, 20.0, 20.0), (20.0 + 2 * d1, 20.0, 20.0))
        assert np.max(h2.taps) == pytest.approx(0.5 * np.max(h1.taps), rel=1e-12)

    @pytest.mark.parametrize("t60", [0.3, 0.4, 0.5, 0.6])
    def test_schroeder_t60_within_20pct(self, t60):
        room = rir.RoomSpec((6.0, 4.0, 3.0), t60)
        h = rir.simulate_rir(room, (1.5, 2.0, 1.5), (4.2, 2.3, 1.4), rng_seed=1)
        est = rir.estimate_t60(h)
        assert abs(est / t60 - 1.0) <= 0.2

    def test_t60_other_rooms(self):
        cases = [
            ((3.0, 3.0, 2.5), (0.8, 1.0, 1.2), (2.2, 1.9, 1.3)),
            ((5.0, 4.0, 2.6), (2.5, 3.1, 1.3), (1.2, 1.0, 1.7)),
            ((7.0, 6.0, 3.2), (2.0, 2.0, 1.5), (5.5, 4.5, 1.6)),
        ]
        for dims, src, mic in cases:
            for t60 in (0.3, 0.6):
                h = rir.simulate_rir(rir.RoomSpec(dims, t60), src, mic, rng_seed=2)
                est = rir.estimate_t60(h)
                assert abs(est / t60 - 1.0) <= 0.2, (dims, t60, est)

    def test_outside_room_rejected(self):
        room = rir.RoomSpec((6.0, 4.0, 3.0), 0.3)
        with pytest.raises(ValueError):
            rir.simulate_rir(room, (7.0, 2.0, 1.5), (3.0, 2.0, 1.5))
        with pytest.raises(ValueError):
            rir.simulate_rir(room, (3.0, 2.0, 1.5), (3.0, 4.0, 1.5))

    def test_deterministic(self):
        room = rir.RoomSpec((6.0, 4.0, 3.0), 0.5)
        h1 = rir.simulate_rir(room, (1.5, 2.0, 1.5), (4.2, 2.3, 1.4), rng_seed=9)
        h2 = rir.simulate_rir(room, (1.5, 2.0, 1.5), (4.2, 2.3, 1.4), rng_seed=9)
        assert np.array_equal(h1.taps, h2.taps)

    def test_room_validation(self):
        with pytest.raises(ValueError):
            rir.RoomSpec((6.0, -4.0, 3.0), 0.3)
        with pytest.raises(ValueError):
            rir.RoomSpec((6.0, 4.0, 3.0), 2.0)


class TestSplit:
    def test_anechoic_all_clean(self):
        room = rir.RoomSpec((6.0, 4.0, 3.0), 0.0)
        h = rir.simulate_rir(room, (1.0, 2.0, 1.5), (3.0, 2.0, 1.5))
        sp = rir.split_clean_late(h)
        assert np.array_equal(sp.clean.taps, h.taps)
        assert np.all(sp.late.taps == 0.0)

    def test_exact_decomposition(self):
        for t60 in (0.3, 0.6):
            room = rir.RoomSpec((6.0, 4.0, 3.0), t60)
            h = rir.simulate_rir(room, (1.5, 2.0, 1.5), (4.2, 2.3, 1.4), rng_seed=0)
            sp = rir.split_clean_late(h)
            assert np.max(np.abs(sp.clean.taps + sp.late.taps - h.taps)) <= 1e-12

    def test_clean_decay_capped(self):
        room = rir.RoomSpec((6.0, 4.0, 3.0), 0.6)
        h = rir.simulate_rir(room, (1.5, 2.0, 1.5), (4.2, 2.3, 1.4), rng_seed=1)
        sp = rir.split_clean_late(h, early_ms=20.0, target_t60=0.2)
        assert rir.estimate_t60(sp.clean) <= 0.2 * 1.2

    def test_preconditions(self):
        room = rir.RoomSpec((6.0, 4.0, 3.0), 0.3)
        h = rir.simulate_rir(room, (1.5, 2.0, 1.5), (4.2, 2.3, 1.4))
        with pytest.raises(ValueError):
            rir.split_clean_late(h, early_ms=-1.0)
        with pytest.raises(ValueError):
            rir.split_clean_late(h, target_t60=0.0)
