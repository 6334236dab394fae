import numpy as np
import pytest

from drayage.physics.auxiliaries import (
    ambient_load,
    aux_power_at,
    average_aux_power,
    component_duty,
    diesel_aux_torque,
    duty_from_ambient,
    is_on,
    on_power,
)
from drayage.utils.units import c_to_k, rpm_to_rad_s


def _comp(vehicle, name):
    return next(c for c in vehicle.aux if c.name == name)


class TestDuty:
    def test_duty_matches_target(self):
        assert duty_from_ambient(1149.0, 3830.0) == pytest.approx(0.3)
        assert duty_from_ambient(5000.0, 3830.0) == 1.0
        with pytest.raises(ValueError):
            duty_from_ambient(100.0, 0.0)

    def test_ambient_curve(self, diesel):
        curve = diesel.ambient_curves["hvac"]
        assert ambient_load(curve, c_to_k(20.0)) == pytest.approx(1149.0)
        assert ambient_load(curve, c_to_k(25.0)) == pytest.approx(1532.0)
        assert ambient_load(curve, c_to_k(-40.0)) == pytest.approx(3830.0)

    def test_hvac_duty_uses_reference_speed(self, diesel):
        comp = _comp(diesel, "hvac_compressor")
        assert component_duty(comp, diesel, c_to_k(20.0)) == pytest.approx(0.3)
        assert component_duty(comp, diesel, c_to_k(-20.0)) == pytest.approx(1.0)

    def test_phase(self):
        assert is_on(5.0, 100.0, 0.1)
        assert not is_on(15.0, 100.0, 0.1)
        assert is_on(105.0, 100.0, 0.1)
        assert is_on(15.0, None, 0.1)
        assert not is_on(0.0, 100.0, 0.0)


class TestPower:
    def test_speed_table(self, diesel):
        comp = _comp(diesel, "power_steering")
        assert on_power(comp, diesel.aux_speed_rpm, 1500.0) == pytest.approx(8040.0)
        assert on_power(comp, diesel.aux_speed_rpm, 3000.0) == pytest.approx(12990.0)
        with pytest.raises(ValueError, match="engine speed"):
            on_power(comp, diesel.aux_speed_rpm, None)

    def test_steering_average(self, diesel):
        avg = average_aux_power(diesel, c_to_k(20.0), rpm=1500.0)
        assert avg["power_steering"] == pytest.approx(804.0)
        assert avg["total"] == pytest.approx(sum(v for k, v in avg.items() if k != "total"))

    def test_instantaneous_matches_average_over_a_cycle(self, electric):
        t_amb = c_to_k(10.0)
        # 600 s is a whole number of every period
        samples = [aux_power_at(float(t), electric, t_amb)["total"] for t in np.arange(0.0, 600.0, 0.5)]
        assert np.mean(samples) == pytest.approx(average_aux_power(electric, t_amb)["total"], rel=1e-2)

    def test_extra_loads_join_the_total(self, electric):
        p = aux_power_at(0.0, electric, c_to_k(20.0), extra={"btms_heater": 6000.0})
        assert p["btms_heater"] == 6000.0
        assert p["total"] == pytest.approx(sum(v for k, v in p.items() if k != "total"))

    def test_aux_scale(self, electric):
        scaled = electric.model_copy(update={"aux_scale": 1.1})
        base = average_aux_power(electric, c_to_k(20.0))["total"]
        assert average_aux_power(scaled, c_to_k(20.0))["total"] == pytest.approx(1.1 * base)

    def test_negative_time(self, electric):
        with pytest.raises(ValueError):
            aux_power_at(-1.0, electric, c_to_k(20.0))


class TestCrankTorque:
    def test_torque(self):
        assert diesel_aux_torque(15_700.0, 157.0) == pytest.approx(100.0)

    def test_stalled_engine(self):
        assert diesel_aux_torque(0.0, 0.0) == 0.0
        with pytest.raises(ValueError):
            diesel_aux_torque(500.0, 0.0)

    def test_diesel_needs_speed(self, diesel):
        p = aux_power_at(0.0, diesel, c_to_k(20.0), omega_eng=rpm_to_rad_s(1500.0))
        assert p["transmission"] == 500.0
        assert p["power_steering"] == pytest.approx(8040.0)
