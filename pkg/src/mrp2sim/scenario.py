"""Scenario data: products, bills of material, routings, machines, calendars,
cost rates, and processing-time calibration.

Three built-in production structures are provided (two flow shops and one job
shop on six machines M1..M6).  Raw materials are always available and carry no
routing.  Processing times are not fixed constants: they are calibrated per
machine so that the average monthly demand loads every machine with the same
number of hours (352/400/448 h for shop load 2.2/2.5/2.8 shifts per day).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


class ScenarioError(ValueError):
    """Raised when a scenario file or configuration value is invalid."""


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Material:
    id: int
    kind: str                                   # "finished" | "sub" | "raw"
    components: tuple[tuple[int, int], ...]     # (component id, qty per piece)
    routing: tuple[str, ...]                    # machine ids, in process order

    def __post_init__(self) -> None:
        if self.kind == "raw":
            if self.routing or self.components:
                raise ScenarioError(f"material {self.id}: raw materials have no routing/components")
        elif not self.routing:
            raise ScenarioError(f"material {self.id}: non-raw material needs a routing")


@dataclass(frozen=True)
class Machine:
    id: str
    # available hours per month, keyed by shift plan (1 = 10 shifts/week, 2 = 15)
    capacity: dict[int, float] = field(default_factory=lambda: {1: 320.0, 2: 480.0})


@dataclass(frozen=True)
class Calendar:
    """Day-level clock underneath the monthly capacity figures.

    A month is exactly 4 weeks: 20 working days, 28 calendar days.  The
    10-shift plan provides 16 machine hours per working day, the 15-shift plan
    24 h, which reproduces the 320/480 monthly hours exactly.  Machines idle
    on weekends; demand arrivals and cost accrual continue.
    """

    working_days_per_month: int = 20
    calendar_days_per_month: int = 28
    shift_hours: dict[int, float] = field(default_factory=lambda: {1: 16.0, 2: 24.0})

    def monthly_capacity(self, shift_plan: int) -> float:
        return self.working_days_per_month * self.shift_hours[shift_plan]

    @staticmethod
    def is_working_day(day: int) -> bool:
        return day % 7 < 5

    def working_days_of_month(self, month_index: int) -> list[int]:
        start = month_index * self.calendar_days_per_month
        return [d for d in range(start, start + self.calendar_days_per_month)
                if Calendar.is_working_day(d)]


@dataclass(frozen=True)
class CostRates:
    internal: float          # CU per internal capacity hour
    external: float          # CU per external capacity hour
    backorder: float         # CU per piece per day late
    holding_sub: float = 0.5       # CU per piece per calendar day
    holding_finished: float = 1.0

    def __post_init__(self) -> None:
        if not self.internal < self.external:
            raise ScenarioError("internal capacity rate must be below external rate")
        if min(self.internal, self.external, self.backorder,
               self.holding_sub, self.holding_finished) < 0:
            raise ScenarioError("cost rates must be non-negative")

    def holding(self, kind: str) -> float:
        if kind == "finished":
            return self.holding_finished
        if kind == "sub":
            return self.holding_sub
        return 0.0      # raw materials are free and always available

    @property
    def monthly_holding_finished(self) -> float:
        # holding accrues per calendar day, so one planning month costs 28x
        return 28.0 * self.holding_finished


CAPACITY_COST_LEVELS = {"low": (50.0, 100.0), "med": (100.0, 200.0), "high": (200.0, 400.0)}
BACKORDER_COST_LEVELS = {"low": 9.0, "med": 19.0, "high": 99.0}
SHOP_LOADS = (2.2, 2.5, 2.8)
STRUCTURE_KINDS = ("flow_many", "flow_low", "job_many")
DEMAND_PATTERNS = ("constant", "seasonal")

ETA_GRID = tuple(round(0.5 + 0.02 * q, 2) for q in range(26))
ALPHA_GRID = tuple(round(0.05 * k, 2) for k in range(11))


def cost_rates(capacity_level: str, backorder_level: str) -> CostRates:
    try:
        ci, ce = CAPACITY_COST_LEVELS[capacity_level]
    except KeyError:
        raise ScenarioError(f"capacity_cost_level: unknown level {capacity_level!r}") from None
    try:
        cb = BACKORDER_COST_LEVELS[backorder_level]
    except KeyError:
        raise ScenarioError(f"backorder_cost_level: unknown level {backorder_level!r}") from None
    return CostRates(internal=ci, external=ce, backorder=cb)


# ---------------------------------------------------------------------------
# built-in production structures
# ---------------------------------------------------------------------------

_MACHINES = tuple(f"M{i}" for i in range(1, 7))

# (material, routing machines, component) rows; component qty is always 1.
# Finished: 10..17, subs: 20..33, raws: 100/110/120/130.
_FLOW_MANY = [
    (10, ("M5",), 20), (11, ("M5",), 20),
    (12, ("M6",), 21), (13, ("M6",), 21),
    (14, ("M5",), 22), (15, ("M5",), 22),
    (16, ("M6",), 23), (17, ("M6",), 23),
    (20, ("M3",), 30), (21, ("M4",), 31),
    (22, ("M3",), 32), (23, ("M4",), 33),
    (30, ("M1",), 100), (31, ("M2",), 110),
    (32, ("M1",), 120), (33, ("M2",), 130),
]

_JOB_MANY = [
    (10, ("M5",), 20), (11, ("M5",), 20),
    (12, ("M6",), 21), (13, ("M6",), 21),
    (14, ("M5",), 22), (15, ("M5",), 22),
    (16, ("M6",), 23), (17, ("M6",), 23),
    (20, ("M3",), 30), (21, ("M4",), 31),
    (22, ("M6", "M4"), 32), (23, ("M1", "M4"), 33),
    (30, ("M1",), 100), (31, ("M2",), 110),
    (32, ("M1", "M3"), 120), (33, ("M2", "M3"), 130),
]

_FLOW_LOW = [
    (10, ("M5",), 20), (11, ("M5",), 20),
    (12, ("M6",), 21), (13, ("M6",), 21),
    (20, ("M3",), 30), (21, ("M4",), 31),
    (22, ("M3",), 32), (23, ("M4",), 33),
    (30, ("M1",), 100), (31, ("M2",), 110),
    (32, ("M1",), 120), (33, ("M2",), 130),
]

_STRUCTURE_ROWS = {"flow_many": _FLOW_MANY, "job_many": _JOB_MANY, "flow_low": _FLOW_LOW}


@dataclass(frozen=True)
class Structure:
    kind: str
    materials: dict[int, Material]
    machines: tuple[Machine, ...]

    @property
    def finished_ids(self) -> tuple[int, ...]:
        return tuple(m.id for m in self.materials.values() if m.kind == "finished")

    @property
    def producible_ids(self) -> tuple[int, ...]:
        return tuple(m.id for m in self.materials.values() if m.kind != "raw")

    def bom_levels(self) -> list[list[int]]:
        """Producible materials grouped top-down: finished first, then subs in
        dependency order (a material appears after every parent that uses it)."""
        depth: dict[int, int] = {m: 0 for m in self.finished_ids}
        frontier = list(self.finished_ids)
        while frontier:
            nxt = []
            for mid in frontier:
                for comp, _q in self.materials[mid].components:
                    if self.materials[comp].kind == "raw":
                        continue
                    d = depth[mid] + 1
                    if d > depth.get(comp, -1):
                        depth[comp] = d
                        nxt.append(comp)
            frontier = nxt
        levels: list[list[int]] = [[] for _ in range(max(depth.values()) + 1)]
        for mid in sorted(depth):
            levels[depth[mid]].append(mid)
        return levels


def build_structure(kind: str) -> Structure:
    """Return one of the built-in material/routing/BOM presets."""
    if kind not in _STRUCTURE_ROWS:
        raise ScenarioError(f"structure: unknown kind {kind!r}")
    rows = _STRUCTURE_ROWS[kind]
    ids = {r[0] for r in rows}
    raw_ids = sorted({comp for _, _, comp in rows if comp not in ids})
    materials: dict[int, Material] = {}
    for mat_id, routing, comp in rows:
        mat_kind = "finished" if mat_id < 20 else "sub"
        materials[mat_id] = Material(mat_id, mat_kind, ((comp, 1),), routing)
    for rid in raw_ids:
        materials[rid] = Material(rid, "raw", (), ())
    _check_acyclic(materials)
    return Structure(kind=kind, materials=materials,
                     machines=tuple(Machine(mid) for mid in _MACHINES))


def _check_acyclic(materials: dict[int, Material]) -> None:
    seen: set[int] = set()

    def visit(mid: int, stack: tuple[int, ...]) -> None:
        if mid in stack:
            raise ScenarioError(f"BOM cycle through material {mid}")
        if mid in seen:
            return
        seen.add(mid)
        for comp, _ in materials[mid].components:
            visit(comp, stack + (mid,))

    for mid in materials:
        visit(mid, ())


# ---------------------------------------------------------------------------
# processing-time calibration
# ---------------------------------------------------------------------------

def monthly_requirements(structure: Structure, forecast_avg: dict[int, float]) -> dict[int, float]:
    """Average monthly pieces required per material, cascading finished-product
    demand down the BOM (all component quantities multiply through)."""
    req = {mid: 0.0 for mid in structure.materials}
    for fid in structure.finished_ids:
        req[fid] += forecast_avg[fid]
    for level in structure.bom_levels():
        for mid in level:
            for comp, qty in structure.materials[mid].components:
                req[comp] += req[mid] * qty
    return req


def machine_piece_operations(structure: Structure, forecast_avg: dict[int, float]) -> dict[str, float]:
    """Monthly piece-operations crossing each machine (one count per routing
    step, so a two-operation material loads two machines)."""
    req = monthly_requirements(structure, forecast_avg)
    ops = {m.id: 0.0 for m in structure.machines}
    for mat in structure.materials.values():
        for machine_id in mat.routing:
            ops[machine_id] += req[mat.id]
    return ops


def target_hours(rho: float) -> float:
    # shifts/day x 8 h/shift x 20 working days
    return rho * 8.0 * 20.0


def calibrate_processing_times(structure: Structure, forecast_avg: dict[int, float],
                               rho: float) -> dict[tuple[int, int], float]:
    """Per-operation processing times (hours/piece) keyed by (material, op index).

    Every operation on machine j receives the same uniform time
    ``target_hours(rho) / piece_operations(j)``, which loads all machines with
    exactly the same monthly hours.
    """
    ops = machine_piece_operations(structure, forecast_avg)
    hours = target_hours(rho)
    per_machine: dict[str, float] = {}
    for machine_id, count in ops.items():
        if count <= 0:
            raise ScenarioError(f"machine {machine_id} has no piece-operations; "
                                "structure or forecast malformed")
        per_machine[machine_id] = hours / count
    times: dict[tuple[int, int], float] = {}
    for mat in structure.materials.values():
        for k, machine_id in enumerate(mat.routing):
            times[(mat.id, k)] = per_machine[machine_id]
    return times


# ---------------------------------------------------------------------------
# scenario configuration file
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioConfig:
    structure: str = "flow_many"
    demand_pattern: str = "constant"
    rho: float = 2.5
    capacity_cost_level: str = "med"
    backorder_cost_level: str = "med"
    alpha: float = 0.0
    eta: float | None = None
    years: int = 4
    warmup_years: int = 1
    replications: int = 10
    seed: int = 12345
    # documented switches (defaults follow the main text reading)
    seasonal_phase: str = "prose"      # "prose": trough month 4, peak month 10
    degenerate_demand: bool = False    # deterministic amounts/lead times/interarrivals
    sub_safety_stock: float = 0.0      # pieces, applied to every sub-material
    backorder_per_order: bool = False  # accrue per order instead of per piece

    def __post_init__(self) -> None:
        if self.structure not in STRUCTURE_KINDS:
            raise ScenarioError(f"structure: unknown kind {self.structure!r}")
        if self.demand_pattern not in DEMAND_PATTERNS:
            raise ScenarioError(f"demand_pattern: unknown pattern {self.demand_pattern!r}")
        if self.rho not in SHOP_LOADS:
            raise ScenarioError(f"rho: {self.rho} not one of {SHOP_LOADS}")
        if self.capacity_cost_level not in CAPACITY_COST_LEVELS:
            raise ScenarioError(f"capacity_cost_level: unknown level {self.capacity_cost_level!r}")
        if self.backorder_cost_level not in BACKORDER_COST_LEVELS:
            raise ScenarioError(f"backorder_cost_level: unknown level {self.backorder_cost_level!r}")
        if not 0.0 <= self.alpha <= 0.5:
            raise ScenarioError(f"alpha: {self.alpha} outside [0.0, 0.5]")
        if self.eta is not None and not 0.5 <= self.eta <= 1.0:
            raise ScenarioError(f"eta: {self.eta} outside [0.5, 1.0]")
        if self.years < 1:
            raise ScenarioError(f"years: {self.years} must be >= 1")
        if not 0 <= self.warmup_years < self.years:
            raise ScenarioError(f"warmup_years: {self.warmup_years} must be in [0, years)")
        if self.replications < 1:
            raise ScenarioError(f"replications: {self.replications} must be >= 1")
        if self.seasonal_phase not in ("prose", "table"):
            raise ScenarioError(f"seasonal_phase: {self.seasonal_phase!r} not 'prose' or 'table'")
        if self.sub_safety_stock < 0:
            raise ScenarioError("sub_safety_stock: must be >= 0")

    @property
    def scenario_id(self) -> str:
        """Short code like ``f_m_c`` (structure / product count / demand pattern),
        suffixed with any non-medium factor levels."""
        shop = "f" if self.structure.startswith("flow") else "j"
        count = "l" if self.structure.endswith("low") else "m"
        pat = self.demand_pattern[0]
        code = f"{shop}_{count}_{pat}"
        extras = []
        if self.rho != 2.5:
            extras.append(f"r{self.rho}")
        if self.capacity_cost_level != "med":
            extras.append(f"c{self.capacity_cost_level}")
        if self.backorder_cost_level != "med":
            extras.append(f"b{self.backorder_cost_level}")
        return code + ("@" + "_".join(extras) if extras else "")

    @property
    def months(self) -> int:
        return 12 * self.years

    @property
    def warmup_months(self) -> int:
        return 12 * self.warmup_years

    def rates(self) -> CostRates:
        return cost_rates(self.capacity_cost_level, self.backorder_cost_level)


_SCHEMA: dict[str, type | tuple[type, ...]] = {
    "structure": str, "demand_pattern": str, "rho": (int, float),
    "capacity_cost_level": str, "backorder_cost_level": str,
    "alpha": (int, float), "eta": (int, float), "years": int,
    "warmup_years": int, "replications": int, "seed": int,
    "seasonal_phase": str, "degenerate_demand": bool,
    "sub_safety_stock": (int, float), "backorder_per_order": bool,
}


def scenario_from_dict(raw: dict) -> ScenarioConfig:
    unknown = sorted(set(raw) - set(_SCHEMA))
    if unknown:
        raise ScenarioError(f"unknown configuration keys: {', '.join(unknown)}")
    kwargs = {}
    for key, value in raw.items():
        expected = _SCHEMA[key]
        if isinstance(value, bool) and expected is not bool:
            raise ScenarioError(f"{key}: expected {expected}, got bool")
        if not isinstance(value, expected):
            raise ScenarioError(f"{key}: expected {expected}, got {type(value).__name__}")
        if key in ("rho", "alpha", "eta", "sub_safety_stock"):
            value = float(value)
        kwargs[key] = value
    return ScenarioConfig(**kwargs)


def load_scenario(path: str | Path) -> ScenarioConfig:
    """Parse and validate a JSON scenario file.  Unknown keys are rejected;
    missing keys take the documented defaults (e.g. 10 replications)."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ScenarioError(f"{path}: top level must be a JSON object")
    return scenario_from_dict(raw)
