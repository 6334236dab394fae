"""Process-wide cache of calibration tables (engine, machine, cell), keyed by resolved file path."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .models.vehicle import VehicleConfig
from .physics.battery import CellTable
from .physics.diesel import EngineMap
from .physics.electric import MotorMap

_tables: dict[tuple, object] | None = None


@dataclass(frozen=True)
class VehicleMaps:
    engine: EngineMap | None = None
    motor: MotorMap | None = None
    cells: CellTable | None = None


def init_cache() -> None:
    global _tables
    if _tables is None:
        _tables = {}


def clear_cache() -> None:
    global _tables
    _tables = None


def _require_tables() -> dict[tuple, object]:
    if _tables is None:
        raise RuntimeError("calibration cache not initialized")
    return _tables


def _cached(key: tuple, loader):
    tables = _require_tables()
    if key not in tables:
        tables[key] = loader()
    return tables[key]


def _key(*paths: Path) -> tuple:
    return tuple(str(p.resolve()) for p in paths)


def maps_for(vehicle: VehicleConfig) -> VehicleMaps:
    """Tables a vehicle needs; each file is parsed once per process."""
    init_cache()
    engine = motor = cells = None
    if vehicle.diesel is not None:
        spec = vehicle.diesel.engine
        fuel, curve = vehicle.resolve(spec.fuel_map_file), vehicle.resolve(spec.torque_curve_file)
        engine = _cached(
            ("engine", *_key(fuel, curve), spec.idle_rpm),
            lambda: EngineMap.from_files(fuel, curve, spec.idle_rpm),
        )
    if vehicle.eaxle is not None:
        eff = vehicle.resolve(vehicle.eaxle.efficiency_map_file)
        lim = vehicle.resolve(vehicle.eaxle.torque_limits_file)
        motor = _cached(("motor", *_key(eff, lim)), lambda: MotorMap.from_files(eff, lim))
    if vehicle.pack is not None:
        table = vehicle.resolve(vehicle.pack.cell.table_file)
        cells = _cached(("cells", *_key(table)), lambda: CellTable.from_csv(table))
    return VehicleMaps(engine=engine, motor=motor, cells=cells)
