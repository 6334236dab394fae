import math

import pandas as pd
import pytest

from drayage import config
from drayage.calibration import maps_for
from drayage.exceptions import EnergyInfeasibleError
from drayage.models.vehicle import CellParams
from drayage.physics.battery import (
    BatteryState,
    CellTable,
    battery_size_variant,
    btms_control,
    btms_power,
    chemical_power,
    cell_ambient_thermal_step,
    cell_current,
    cell_loss,
    cell_step,
    cell_thermal_step,
    housing_step,
    initial_state,
    pack_scale,
    size_pack,
    voltage_rmse,
)
from drayage.utils.tables import read_metadata
from drayage.utils.units import c_to_k


def make_cell(**overrides):
    kwargs = {
        "table_file": "unused.csv",
        "q_nom": 4.85,
        "nominal_voltage": 3.63,
        "heat_capacity": 70.0,
        "r_th": 4.0,
        "r_th_ambient": 8.0,
    }
    kwargs.update(overrides)
    return CellParams(**kwargs)


def make_state(**overrides):
    kwargs = {"soc": 0.8, "t_cell": c_to_k(25.0), "t_house": c_to_k(25.0)}
    kwargs.update(overrides)
    return BatteryState(**kwargs)


@pytest.fixture
def rc_table():
    # tau = 60 s
    return CellTable.constant(3.0, 4.2, r0=0.02, r1=0.01, c1=6000.0)


class TestCellTable:
    def test_shipped_table(self, electric):
        table = maps_for(electric).cells
        assert table.v_oc(0.0) == pytest.approx(3.0)
        assert table.v_oc(1.0) == pytest.approx(4.19)
        assert table.v_oc(0.85) == pytest.approx(4.085)

    def test_rejects_partial_soc_range(self):
        with pytest.raises(ValueError, match="SoC"):
            CellTable([0.1, 1.0], [3.0, 4.0], [0.02] * 2, [0.01] * 2, [3000] * 2)

    def test_rejects_falling_ocv(self):
        with pytest.raises(ValueError, match="open-circuit"):
            CellTable([0.0, 1.0], [4.0, 3.0], [0.02] * 2, [0.01] * 2, [3000] * 2)


class TestElectrical:
    def test_coulomb_counting_is_exact(self, rc_table):
        cell = make_cell()
        currents = [5.0, -2.0, 9.7, 0.0, 3.3]
        durations = [120.0, 60.0, 300.0, 30.0, 45.0]
        state = make_state()
        charge = 0.0
        for i, d in zip(currents, durations):
            for _ in range(int(d)):
                state = cell_step(state, i, 1.0, cell, rc_table)
            charge += i * d
        expected = 0.8 - charge / (3600.0 * cell.q_nom)
        assert state.soc == pytest.approx(expected, rel=1e-12)

    def test_rc_transient_matches_closed_form(self, rc_table):
        cell = make_cell()
        state = make_state()
        i, dt, tau = 5.0, 0.1, 60.0
        for k in range(1, 3001):
            state = cell_step(state, i, dt, cell, rc_table)
            if k % 100 == 0:
                exact = i * 0.01 * (1.0 - math.exp(-k * dt / tau))
                assert state.v_rc == pytest.approx(exact, rel=1e-3)

    def test_terminal_voltage(self, rc_table):
        cell = make_cell()
        state = cell_step(make_state(), 4.0, 1.0, cell, rc_table)
        v_oc = rc_table.v_oc(state.soc)
        assert state.v_cell == pytest.approx(v_oc - 0.02 * 4.0 - state.v_rc)
        assert state.q_gen == pytest.approx(4.0 * (v_oc - state.v_cell))
        assert state.q_gen > 0

    def test_cell_loss_and_chemical_power(self, electric, rc_table):
        state = cell_step(make_state(), 4.0, 1.0, make_cell(), rc_table)
        assert cell_loss(state, rc_table) == pytest.approx(state.q_gen)
        assert cell_loss(state, rc_table) == pytest.approx(0.02 * 16.0 + state.v_rc * 4.0)
        chem = chemical_power(state, electric.pack, rc_table)
        assert chem == pytest.approx(electric.pack.n_cells * rc_table.v_oc(state.soc) * 4.0)
        assert chem / electric.pack.n_cells == pytest.approx(state.v_cell * 4.0 + cell_loss(state, rc_table))

    def test_soc_out_of_range(self, rc_table):
        with pytest.raises(EnergyInfeasibleError):
            cell_step(make_state(soc=0.0001), 10.0, 60.0, make_cell(), rc_table)

    def test_fast_branch_is_substepped(self):
        table = CellTable.constant(3.0, 4.2, r0=0.02, r1=0.001, c1=500.0)
        state = cell_step(make_state(), 5.0, 1.0, make_cell(), table, substeps=10)
        # one plain Euler step of tau = 0.5 s would overshoot to 2x the steady value
        assert 0.0 < state.v_rc <= 5.0 * 0.001 * 1.0001

    def test_pack_scaling(self, electric):
        spec = electric.pack
        state = pack_scale(make_state(v_cell=3.7), 240.0, spec)
        assert state.v_batt == pytest.approx(192 * 3.7)
        assert cell_current(240.0, spec) == pytest.approx(2.0)

    def test_initial_state_rests_at_ocv(self, electric):
        table = maps_for(electric).cells
        state = initial_state(electric.pack, table, 0.5, 298.15, 298.15)
        assert state.v_batt == pytest.approx(192 * 3.75)

    def test_shipped_trace_rmse(self, electric):
        path = config.DATA_DIR / "cells" / "reference_pulse_trace.csv"
        soc0 = float(read_metadata(path)["soc0"])
        trace = pd.read_csv(path, comment="#")
        rmse = voltage_rmse(
            trace["time_s"].to_numpy(),
            trace["current_a"].to_numpy(),
            trace["voltage_v"].to_numpy(),
            electric.pack.cell,
            maps_for(electric).cells,
            soc0,
        )
        assert rmse <= 0.005


class TestThermal:
    def test_cell_relaxes_to_housing(self):
        cell = make_cell()
        tau = cell.heat_capacity * cell.r_th
        t_house = c_to_k(25.0)
        state = make_state(t_cell=c_to_k(5.0), t_house=t_house)
        dt = 0.1
        for k in range(1, 5001):
            state = cell_thermal_step(state, dt, cell)
        exact = t_house + (c_to_k(5.0) - t_house) * math.exp(-5000 * dt / tau)
        assert (t_house - state.t_cell) == pytest.approx(t_house - exact, rel=1e-3)

    def test_cell_to_ambient(self):
        cell = make_cell()
        t_amb = c_to_k(-10.0)
        state = cell_ambient_thermal_step(make_state(), t_amb, 1.0, cell)
        assert state.t_cell < c_to_k(25.0)
        assert state.t_house == t_amb

    def test_heater_warms_housing(self, electric):
        spec = electric.pack
        state = make_state(u_h=True)
        out = housing_step(state, c_to_k(25.0), 10.0, spec)
        assert out.t_house - state.t_house == pytest.approx(10.0 * spec.q_heat / spec.housing_heat_capacity)

    def test_both_devices_rejected(self):
        with pytest.raises(ValueError):
            make_state(u_c=True, u_h=True)


class TestBTMS:
    def test_heater_hysteresis(self, electric):
        spec = electric.pack
        assert btms_control(c_to_k(22.0), False, False, spec) == (False, False)
        assert btms_control(c_to_k(19.0), False, False, spec) == (False, True)
        assert btms_control(c_to_k(22.0), False, True, spec) == (False, True)
        assert btms_control(c_to_k(25.5), False, True, spec) == (False, False)

    def test_chiller_hysteresis(self, electric):
        spec = electric.pack
        assert btms_control(c_to_k(28.0), False, False, spec) == (False, False)
        assert btms_control(c_to_k(31.0), False, False, spec) == (True, False)
        assert btms_control(c_to_k(27.0), True, False, spec) == (True, False)
        assert btms_control(c_to_k(24.5), True, False, spec) == (False, False)

    def test_electrical_power(self, electric):
        spec = electric.pack
        assert btms_power(False, True, spec) == (pytest.approx(6_000.0), 0.0)
        assert btms_power(True, False, spec) == (0.0, pytest.approx(6_000.0))
        assert btms_power(False, False, spec) == (0.0, 0.0)


class TestSizing:
    def test_size_pack_rounds_up(self):
        cell = make_cell()
        n_s, n_p = size_pack(400.0, 690.0, cell)
        assert n_s == 191
        assert n_s * n_p * cell.nominal_energy_wh / 1000.0 >= 400.0
        assert n_s * (n_p - 1) * cell.nominal_energy_wh / 1000.0 < 400.0

    def test_bigger_pack_is_heavier(self, electric):
        big = battery_size_variant(electric, 565.0)
        assert big.pack.nominal_energy_kwh >= 565.0
        assert big.body.curb_mass > electric.body.curb_mass
        assert big.pack.n_series == electric.pack.n_series
        assert big.name != electric.name

    def test_diesel_has_no_pack(self, diesel):
        with pytest.raises(ValueError):
            battery_size_variant(diesel, 400.0)
