"""Execute parsed scripts and render run reports."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from . import families as F
from . import manifold as M
from . import tree as T
from .blocks import ZConfig, build_Z
from .dsl import Script, ScriptError, Statement, parse
from .errors import FourfoldError, SchemaError
from .lattice import DEFAULT_R_STAR, dumps, realizability_gate


@dataclass(frozen=True)
class RunConfig:
    r_star: int = DEFAULT_R_STAR
    show_int_flags: bool = False
    out_dir: Path | None = None

    def to_json(self):
        return {"r_star": self.r_star, "show_int_flags": self.show_int_flags}


@dataclass
class RunReport:
    results: list[dict] = field(default_factory=list)
    input_hash: str = ""
    config: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def violations(self) -> int:
        return sum(len(r.get("violations", ())) for r in self.results if r["cmd"] == "check")

    @property
    def certificates_ok(self) -> bool:
        return all(r["certificate"]["verdict"] for r in self.results if r["cmd"] == "certify")

    @property
    def exit_code(self) -> int:
        return 0 if self.violations == 0 and self.certificates_ok else 1

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "engine": f"fourfold {__version__}",
            "input_hash": self.input_hash,
            "config": self.config,
            "results": self.results,
            "violations": self.violations,
            "certificates_ok": self.certificates_ok,
            "exit_code": self.exit_code,
        }
        if timing:
            out["timing"] = {"seconds": round(self.seconds, 6)}
        return out

    def dumps(self, timing: bool = True) -> str:
        return dumps(self.to_json(timing))


def _summary(m: M.ManifoldModel) -> dict:
    return {
        "name": m.name,
        "homeo": m.homeo.to_json(),
        "b_plus": m.homeo.b_plus,
        "nuclei": [n.label for n in m.nuclei],
        "sw_size": len(m.sw),
        "symplectic": m.symplectic,
        "construction": str(m.construction),
    }


def _family_summary(f: F.FamilyElement) -> dict:
    return {
        "host": f.host.name,
        "k": f.k,
        "support_size": len(f.support),
        "construction": str(f.construction),
        "integer_defined": f.integer_defined,
        "one_stably_trivial": f.one_stably_trivial,
    }


def _line_width(values) -> int:
    return max((abs(e) for e in values), default=0) + 1


class Executor:
    def __init__(self, config: RunConfig):
        self.config = config
        self.env: dict[str, object] = {}

    def _path(self, raw: str) -> Path:
        p = Path(raw)
        if not p.is_absolute() and self.config.out_dir is not None:
            p = self.config.out_dir / p
        return p

    def _model(self, call) -> M.ManifoldModel:
        h = call.head
        pos = call.positional()
        if h == "E":
            return M.make_elliptic(pos[0].value)
        if h == "P":
            return M.make_park_block(pos[0].value)
        if h in ("S2xS2", "CP2", "CP2bar", "S4"):
            return M.make_standard(h)
        if h == "logt":
            return M.log_transform(self.env[pos[0].value], call.kw("nucleus"), call.kw("p"))
        if h == "csum":
            return M.connected_sum(self.env[pos[0].value], self.env[pos[1].value])
        if h == "fsum":
            return M.fiber_sum(self.env[pos[0].value], self.env[pos[1].value], pos[2].value, pos[3].value)
        if h == "Z":
            return build_Z(call.kw("p"), call.kw("r"), call.kw("s"), _zconfig(call.kw("v")))
        if h == "load":
            doc = json.loads(self._path(pos[0].value).read_text(encoding="utf-8"))
            return M.ManifoldModel.from_json(doc)
        raise AssertionError(h)

    def _family(self, call) -> F.FamilyElement:
        h = call.head
        pos = call.positional()
        if h == "base":
            return F.base_family(call.kw("q"), self.env[call.on.value])
        if h == "suspend":
            return F.suspend(self.env[pos[0].value])
        if h == "commstep":
            block = call.kw("block")
            return F.commutator_step(self.env[pos[0].value], None if block is None else str(block))
        if h == "compose":
            return F.compose(self.env[pos[0].value], self.env[pos[1].value])
        if h == "alpha":
            return F.alpha(call.kw("p"), call.kw("q"), call.kw("r", 0), call.kw("s", 0), _zconfig(call.kw("v")))
        if h == "load":
            doc = json.loads(self._path(pos[0].value).read_text(encoding="utf-8"))
            return F.FamilyElement.from_json(doc)
        raise AssertionError(h)

    def _eval(self, st: Statement) -> dict:
        name = st.targets[0]
        obj = self.env[name]
        if isinstance(obj, F.FamilyElement):
            line = obj.host.probe_line()
            lo, hi = st.ell or (-_line_width(F.line_values(obj)), _line_width(F.line_values(obj)))
            rows = []
            for ell in range(lo, hi + 1):
                res = F.evaluate(obj, line.at(ell))
                row = {"ell": ell, "class": str(line.at(ell)), "value": res.value}
                if self.config.show_int_flags:
                    row["integer_defined"] = res.integer_defined
                rows.append(row)
            return {"cmd": "eval", "target": name, "kind": "family", "k": obj.k, "rows": rows}
        line = obj.probe_line()
        on_line = [e for e in (F._line_index(line, c) for c in obj.sw.support) if e is not None]
        lo, hi = st.ell or (-_line_width(on_line), _line_width(on_line))
        rows = []
        for ell in range(lo, hi + 1):
            c = line.at(ell)
            row = {"ell": ell, "class": str(c), "value": obj.sw(c)}
            if self.config.show_int_flags:
                row["integer"] = obj.sw.integer(c)
                row["integer_source"] = obj.sw.lift_source or None
            rows.append(row)
        return {"cmd": "eval", "target": name, "kind": "model", "rows": rows}

    def _check(self, name: str) -> dict:
        obj = self.env[name]
        if isinstance(obj, F.FamilyElement):
            return {"cmd": "check", "target": name, "violations": F.validate_family(obj)}
        gate = realizability_gate(obj.homeo, self.config.r_star)
        return {
            "cmd": "check",
            "target": name,
            "violations": [str(v) for v in M.validate_model(obj)],
            "realizability_gate": {"passed": gate.passed, "reasons": list(gate.reasons)},
        }

    def _rewrite(self, name: str) -> dict:
        m = self.env[name]
        before = m.construction
        after = T.mm_rewrite(before)
        normal = T.normalize(before)
        return {
            "cmd": "rewrite",
            "target": name,
            "rule": after.param("rule"),
            "before": str(before),
            "after": str(after.children[0]),
            "normal_form": str(normal),
            "homeo_before": T.evaluate_homeo(before).to_json(),
            "homeo_after": T.evaluate_homeo(after).to_json(),
        }

    def _export(self, st: Statement) -> dict:
        obj = self.env[st.targets[0]]
        path = self._path(st.path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(obj.to_json()), encoding="utf-8")
        return {"cmd": "export", "target": st.targets[0], "path": st.path}

    def run(self, st: Statement) -> dict:
        if st.kind == "let":
            m = self._model(st.expr)
            self.env[st.name] = m
            return {"cmd": "let", "name": st.name, "model": _summary(m)}
        if st.kind == "fam":
            f = self._family(st.expr)
            self.env[st.name] = f
            return {"cmd": "fam", "name": st.name, "family": _family_summary(f)}
        if st.kind == "eval":
            return self._eval(st)
        if st.kind == "certify":
            fams = [self.env[n] for n in st.targets]
            cert = F.independence_certificate(fams, names=list(st.targets))
            return {"cmd": "certify", "targets": list(st.targets), "certificate": cert.to_json(), "table": cert.table()}
        if st.kind == "check":
            return self._check(st.targets[0])
        if st.kind == "rewrite":
            return self._rewrite(st.targets[0])
        if st.kind == "export":
            return self._export(st)
        raise AssertionError(st.kind)


def _zconfig(v) -> ZConfig:
    if v is None:
        return ZConfig()
    return ZConfig(v={"E2": "E2", "park": "park"}.get(str(v), str(v)))


def input_hash(source: str, config: RunConfig) -> str:
    h = hashlib.sha256()
    h.update(source.encode("utf-8"))
    h.update(dumps(config.to_json()).encode("utf-8"))
    return h.hexdigest()


def execute(script: Script | str, config: RunConfig | None = None) -> RunReport:
    """Run statements in order.  Failures raise :class:`ScriptError`."""
    config = config or RunConfig()
    if isinstance(script, str):
        script = parse(script)
    report = RunReport(input_hash=input_hash(script.source, config), config=config.to_json())
    ex = Executor(config)
    start = time.perf_counter()
    for st in script.statements:
        try:
            res = ex.run(st)
        except (FourfoldError, OSError, json.JSONDecodeError, SchemaError) as exc:
            raise ScriptError(st.span, exc, st.text) from exc
        res["line"] = st.span.line
        report.results.append(res)
    report.seconds = time.perf_counter() - start
    return report


def render_table(report: RunReport) -> str:
    out = []
    for r in report.results:
        head = f"[{r['line']}] {r['cmd']}"
        if r["cmd"] == "let":
            m = r["model"]
            h = m["homeo"]
            out.append(f"{head} {r['name']} = {m['construction']}  (b2={h['b2']}, sigma={h['sigma']}, {h['parity']}; |sw|={m['sw_size']})")
        elif r["cmd"] == "fam":
            f = r["family"]
            out.append(f"{head} {r['name']} = {f['construction']}  (k={f['k']}, |support|={f['support_size']}, host {f['host']})")
        elif r["cmd"] == "eval":
            out.append(f"{head} {r['target']}")
            extra = [k for k in ("integer_defined", "integer") if r["rows"] and k in r["rows"][0]]
            out.append(f"  {'ell':>5}  {'value':>5}" + "".join(f"  {k:>15}" for k in extra) + "  class")
            for row in r["rows"]:
                cols = "".join(f"  {str(row[k]):>15}" for k in extra)
                out.append(f"  {row['ell']:>5}  {row['value']:>5}{cols}  {row['class']}")
        elif r["cmd"] == "certify":
            out.append(f"{head} {', '.join(r['targets'])}")
            out.extend("  " + line for line in r["table"].splitlines())
        elif r["cmd"] == "check":
            status = "ok" if not r["violations"] else f"{len(r['violations'])} violation(s)"
            out.append(f"{head} {r['target']}: {status}")
            out.extend(f"  - {v}" for v in r["violations"])
            gate = r.get("realizability_gate")
            if gate is not None:
                out.append(f"  realizability gate: {'pass' if gate['passed'] else 'fail: ' + gate['reasons'][0]}")
        elif r["cmd"] == "rewrite":
            out.append(f"{head} {r['target']} [{r['rule']}]")
            out.append(f"  {r['before']}\n  -> {r['after']}\n  normal form: {r['normal_form']}")
        elif r["cmd"] == "export":
            out.append(f"{head} {r['target']} -> {r['path']}")
    out.append(f"violations: {report.violations}; certificates ok: {report.certificates_ok}; exit {report.exit_code}")
    return "\n".join(out) + "\n"
