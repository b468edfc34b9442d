"""Named example problems with recorded expectations, and a runner that compares."""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

from .checks import check_all
from .model.instance import GmpInstance, load_problem_text
from .table4 import TableSpec, cell_instance, cell_name, certifying_condition, label_matches

H, F = "HOLDS", "FAILS"


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    source: str  # packaged TOML file name, or "table:<a,b,c,d>"
    expect: dict = field(default_factory=dict)  # check -> status
    probe: str | None = None  # expected probe verdict
    label: str | None = None  # expected certifying condition (table cells)

    def load(self) -> GmpInstance:
        if self.source.startswith("table:"):
            return cell_instance(_cell(self.source))
        text = resources.files("cqlab").joinpath(f"fixtures_data/{self.source}").read_text()
        return load_problem_text(text, self.name)


def _cell(source: str) -> tuple:
    return tuple(int(v) for v in source[len("table:"):].split(","))


_FILES = [
    Fixture("ex31", "", "example31.toml",
            {"gmfcq": F, "foscms": H, "soscms": H, "pn": F, "qn": F, "dir_qn": H, "mscq": H}, "BOUNDED"),
    Fixture("ex32", "", "example32.toml", {"soscpn_rays": H}, "DIVERGENCE_SUSPECTED"),
    Fixture("ex33", "", "example33.toml",
            {"gmfcq": F, "pn": F, "soscqn": H, "qn": H, "mscq": H}, "BOUNDED"),
    Fixture("ex34", "", "example34.toml",
            {"gmfcq": F, "foscms": F, "pn": F, "dir_pn": F, "soscqn": H}, "DIVERGENCE_SUSPECTED"),
    Fixture("ex36", "", "example36.toml", {"soscpn_rays": F}, "INCONCLUSIVE"),
    Fixture("mpcc_demo", "", "mpcc_demo.toml",
            {"gmfcq": F, "robinson": H, "foscms": F, "pn": H, "qn": H, "mscq": H}, "BOUNDED"),
    Fixture("mpvc_demo", "", "mpvc_demo.toml",
            {"gmfcq": F, "foscms": F, "soscms": H, "pn": H, "mscq": H}, "BOUNDED"),
    Fixture("mpsc_demo", "", "mpsc_demo.toml",
            {"gmfcq": F, "pn": F, "qn": F}, "DIVERGENCE_SUSPECTED"),
]


def _registry() -> dict[str, Fixture]:
    out = {}
    for fx in _FILES:
        desc = fx.load().description
        out[fx.name] = Fixture(fx.name, desc, fx.source, fx.expect, fx.probe)
    for cell, label in TableSpec().cells.items():
        name = cell_name(cell)
        src = "table:" + ",".join(str(v) for v in cell)
        out[name] = Fixture(name, f"quartic family cell (a, b, c, d) = {cell}", src, label=label)
    return out


_CACHE: dict = {}


def fixtures() -> dict[str, Fixture]:
    if not _CACHE:
        _CACHE.update(_registry())
    return dict(_CACHE)


def get_fixture(name: str) -> Fixture:
    reg = fixtures()
    if name not in reg:
        raise KeyError(f"unknown fixture '{name}'")
    return reg[name]


@dataclass
class FixtureOutcome:
    name: str
    passed: bool
    mismatches: list

    def line(self) -> str:
        s = f"{self.name:<20} {'pass' if self.passed else 'FAIL'}"
        return s + ("" if self.passed else "  " + "; ".join(self.mismatches))


def run_fixture(fx: Fixture, seed: int = 0) -> FixtureOutcome:
    inst = fx.load()
    bad = []
    if fx.label is not None:
        got, _ = certifying_condition(inst, seed)
        if not label_matches(fx.label, got):
            bad.append(f"label: expected {fx.label}, got {got}")
    if fx.expect or fx.probe:
        rep = check_all(inst, seed=seed, probe=fx.probe is not None)
        for k, want in fx.expect.items():
            got = rep.verdicts[k].status if k in rep.verdicts else "missing"
            if got != want:
                bad.append(f"{k}: expected {want}, got {got}")
        if fx.probe is not None:
            got = rep.probe.verdict if rep.probe else "unavailable"
            if got != fx.probe:
                bad.append(f"probe: expected {fx.probe}, got {got}")
    return FixtureOutcome(fx.name, not bad, bad)


def run_fixtures(names=None, seed: int = 0) -> list[FixtureOutcome]:
    reg = fixtures()
    names = list(reg) if not names else list(names)
    return [run_fixture(get_fixture(n), seed) for n in names]
