import numpy as np
import pytest

from conftest import make_route
from drayage.models.vehicle import DriverParams
from drayage.physics.driver import PIState, pedal_command, reference_speed, target_speed, traction_cap
from drayage.scenarios.routes import route_from_frame, route_frame


@pytest.fixture
def params():
    return DriverParams()


class TestReferenceSpeed:
    def test_starts_and_ends_at_rest(self, params):
        ref = reference_speed(make_route(), params)
        assert ref(0.0) == 0.0
        assert ref(ref.end) == 0.0

    def test_capped_by_margin(self, params):
        ref = reference_speed(make_route(v_lim=20.0), params)
        assert ref.v.max() == pytest.approx(params.margin * 20.0)

    def test_envelopes_respect_accel_limits(self, params):
        ref = reference_speed(make_route(), params)
        ds = np.diff(ref.s)
        dv2 = np.diff(ref.v**2)
        assert np.all(dv2 <= 2 * params.a_acc_max * ds + 1e-6)
        assert np.all(-dv2 <= 2 * params.a_dec_max * ds + 1e-6)

    def test_slows_before_a_lower_limit(self, params):
        df = route_frame(make_route(length_m=6_000.0, spacing_m=1_000.0))
        df.loc[df["s_m"] >= 3_000.0, "v_lim_mps"] = 10.0
        route = route_from_frame(df, "step", "outbound", 1)
        ref = reference_speed(route, params)
        assert ref(2_999.0) <= params.margin * 10.0 + 0.1
        assert ref(2_000.0) == pytest.approx(params.margin * 25.0)

    def test_target_floors_at_creep(self, params):
        ref = reference_speed(make_route(), params)
        assert target_speed(ref, 0.0, params) >= params.creep_speed
        assert target_speed(ref, ref.end, params) == 0.0


class TestPedals:
    def test_accelerates_when_slow(self, params):
        cmd, _ = pedal_command(10.0, 20.0, 1.0, PIState(), params)
        assert cmd.app > 0 and cmd.bpp == 0

    def test_brakes_when_fast(self, params):
        cmd, _ = pedal_command(20.0, 10.0, 1.0, PIState(), params)
        assert cmd.bpp > 0 and cmd.app == 0

    def test_saturates_without_windup(self, params):
        state = PIState()
        for _ in range(50):
            cmd, state = pedal_command(0.0, 30.0, 1.0, state, params)
        assert cmd.app == 1.0
        assert state.integral == 0.0

    def test_rejects_bad_dt(self, params):
        with pytest.raises(ValueError):
            pedal_command(0.0, 1.0, 0.0, PIState(), params)


class TestTractionCap:
    def test_comfort_limit_when_far_below_target(self, params):
        cap = traction_cap(0.0, 20.0, 1_500.0, 30_000.0, 0.5, 1.0, params)
        assert cap == pytest.approx((30_000.0 * params.a_acc_max + 1_500.0) * 0.5)

    def test_lands_on_target(self, params):
        cap = traction_cap(19.8, 20.0, 3_000.0, 30_000.0, 0.5, 1.0, params)
        assert cap == pytest.approx((30_000.0 * 0.2 + 3_000.0) * 0.5)

    def test_never_negative(self, params):
        assert traction_cap(25.0, 20.0, 1_000.0, 30_000.0, 0.5, 1.0, params) == 0.0
