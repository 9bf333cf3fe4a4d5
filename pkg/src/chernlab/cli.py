"""Command-line entry point: ``chernlab {rips,homology,chern,verify}``.

Every command prints one JSON document (sorted keys) to stdout or ``--out``.
Exit status is 0 when every reported check passes, 1 when a check fails and
2 for configuration or input errors.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import chain_maps as cm
from . import chern as ch
from .chains import ChainError, Theory, get_chain_complex
from .complexes import (GLOBAL_DIM_CAP, ComplexError, build_power_quotient, build_rips,
                        build_twisted_space, complex_to_json)
from .groups import GeneratingSet, GroupError, default_generators, parse_group_spec, word_metric
from .homology import composes_to_zero, homology
from .linalg import MatrixCapExceeded
from .scalars import format_scalar

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    group_spec: str
    generators: list[int]
    d: Fraction
    max_dim: int
    theory: Theory | None
    equivariant: bool | None
    r: Fraction | None
    kernel: Path | None
    n: int | None
    out: Path | None
    seed: int

    @classmethod
    def from_args(cls, args) -> RunConfig:
        group = parse_group_spec(args.group)
        gens = parse_generators(group, args.gens, args.group)
        d = Fraction(args.d) if args.d is not None else None
        if d is not None and d < 0:
            raise ConfigError("--d must be non-negative")
        if not 0 <= args.max_dim <= GLOBAL_DIM_CAP:
            raise ConfigError(f"--max-dim must lie in [0, {GLOBAL_DIM_CAP}]")
        r = Fraction(args.r) if getattr(args, "r", None) is not None else None
        if r is not None and r < 0:
            raise ConfigError("--r must be non-negative")
        theory = Theory(args.theory) if getattr(args, "theory", None) else None
        eq = getattr(args, "equivariant", None)
        kernel = Path(args.kernel) if getattr(args, "kernel", None) else None
        return cls(args.group, gens, d, args.max_dim, theory, eq, r, kernel,
                   getattr(args, "n", None), Path(args.out) if args.out else None, args.seed)

    def metric(self):
        group = parse_group_spec(self.group_spec)
        return word_metric(GeneratingSet.create(group, self.generators))


def parse_generators(group, text: str | None, spec: str) -> list[int]:
    """Labels or indices, comma separated; permutation labels like ``(0 1)`` may be juxtaposed."""
    if not text:
        return default_generators(group, spec)
    tokens = re.findall(r"\([^()]*\)(?:\([^()]*\))*|[^,\s()]+", text)
    out = []
    for tok in tokens:
        if tok in group.labels:
            out.append(group.index_of(tok))
        elif re.fullmatch(r"-?\d+", tok):
            # cyclic groups: a negative integer is the inverse residue
            v = int(tok)
            if v < 0 and str(-v) in group.labels:
                out.append(group.inverse(group.index_of(str(-v))))
            elif 0 <= v < group.order:
                out.append(v)
            else:
                raise ConfigError(f"generator {tok!r} out of range")
        else:
            raise ConfigError(f"unknown generator {tok!r}")
    return out


def _emit(payload: dict, out: Path | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2, default=_json_default) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _json_default(x):
    if isinstance(x, Fraction):
        return format_scalar(x)
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _rips(cfg: RunConfig, max_dim: int | None = None):
    if cfg.d is None:
        raise ConfigError("--d is required")
    return build_rips(parse_group_spec(cfg.group_spec), cfg.metric(), cfg.d,
                      cfg.max_dim if max_dim is None else max_dim)


def _header(cfg: RunConfig) -> dict:
    return {"group": cfg.group_spec, "generators": cfg.generators,
            "d": None if cfg.d is None else format_scalar(cfg.d), "max_dim": cfg.max_dim}


# commands -------------------------------------------------------------------


def cmd_rips(cfg: RunConfig) -> tuple[dict, bool]:
    X = _rips(cfg)
    return {**_header(cfg), "f_vector": X.f_vector, "complex": complex_to_json(X)}, True


def _space_for(cfg: RunConfig, X):
    if cfg.theory is Theory.TWISTED_CYCLIC:
        return build_twisted_space(X, cfg.r if cfg.r is not None else cfg.d)
    return X


def cmd_homology(cfg: RunConfig) -> tuple[dict, bool]:
    """Homology in degrees 0 .. max_dim - 1 (each needs simplices one dimension up)."""
    X = _rips(cfg)
    theory = cfg.theory or Theory.SIMPLICIAL
    cfg.theory = theory
    cx = get_chain_complex(_space_for(cfg, X), theory, cfg.equivariant)
    results = [homology(cx, k) for k in range(cfg.max_dim)]
    return {**_header(cfg), "theory": theory.value, "equivariant": cx.equivariant,
            "betti": [h.betti for h in results], "results": [h.to_json() for h in results]}, True


def _load_pair(cfg: RunConfig, metric):
    group = metric.group
    if cfg.kernel is None:
        return ch.IdempotentPair(ch.averaging_idempotent(group, metric))
    obj = json.loads(cfg.kernel.read_text(encoding="utf-8"))
    if "group" in obj:
        given = ch.group_from_json(obj["group"])
        if given != group:
            raise ConfigError("kernel file group differs from --group")
    p = ch.pair_from_json(obj, group, metric)
    return p


def _chern_report(c: ch.ChernClass) -> dict:
    bound = (c.n + 1) * c.propagation
    diam = ch.support_diameter(c)
    body = c.to_json()
    body["ordered_terms"] = [
        {"g": g, "tuple": list(xs), "value": format_scalar(v)}
        for (g, xs), v in sorted(c.ordered_terms.items(), key=lambda t: (t[0][0] or 0, t[0][1]))]
    body["checks"] = {
        "cycle": all(not comp.boundary() for comp in c.components.values() if comp.degree > 0),
        "support_diameter": format_scalar(diam),
        "locality_bound": bound,
        "locality": diam <= bound,
    }
    return body


def cmd_chern(cfg: RunConfig) -> tuple[dict, bool]:
    metric = cfg.metric()
    p = _load_pair(cfg, metric)
    if not ch.is_idempotent_pair(p):
        raise ConfigError("kernel is not an idempotent pair")
    n = 0 if cfg.n is None else cfg.n
    prop = ch.propagation(p.q, metric)
    d = cfg.d if cfg.d is not None else Fraction((n + 1) * prop)
    kinds = {Theory.INVARIANT: ["torsion_free"], Theory.SIMPLICIAL: ["torsion_free"],
             Theory.TWISTED_CYCLIC: ["twisted"], None: ["torsion_free", "twisted"]}
    if cfg.theory not in kinds:
        raise ConfigError("--theory for chern must be invariant or twisted_cyclic")
    out = {**_header(cfg), "d": format_scalar(d), "n": n, "propagation": prop}
    ok = True
    for kind in kinds[cfg.theory]:
        c = ch.chern(p, n, d, metric, twisted=(kind == "twisted"))
        rep = _chern_report(c)
        ok = ok and rep["checks"]["cycle"] and rep["checks"]["locality"]
        out[kind] = rep
    out["passed"] = ok
    return out, ok


# verification suite ---------------------------------------------------------


def _check(name: str, passed: bool, **details) -> dict:
    return {"name": name, "passed": bool(passed), **details}


def _boundary_checks(X, cfg: RunConfig) -> list[dict]:
    out = []
    T = build_twisted_space(X, cfg.r if cfg.r is not None else cfg.d)
    for theory in Theory:
        space = T if theory is Theory.TWISTED_CYCLIC else X
        cx = get_chain_complex(space, theory)
        for k in range(2, cfg.max_dim + 1):
            out.append(_check(f"boundary_squared[{theory.value},{k}]", composes_to_zero(cx, k)))
    return out


def _dimension_checks(X, top: int) -> list[dict]:
    out = []
    inv = [homology(X, k, Theory.INVARIANT).betti for k in range(top + 1)]
    cyc = [homology(X, k, Theory.CYCLIC, True).betti for k in range(top + 1)]
    for n in range(top + 1):
        rhs = sum(inv[k] for k in range(n % 2, n + 1, 2))
        out.append(_check(f"cyclic_vs_invariant_dims[{n}]", cyc[n] == rhs, cyclic=cyc[n], invariant_sum=rhs))
    return out


def _chain_map_checks(X, cfg: RunConfig, top: int) -> list[dict]:
    out = []
    maps = [cm.chi(X), cm.phi_diag(X), cm.phi_drop2(X), cm.psi(X)]
    for f in maps:
        rep = cm.verify_chain_map(f, range(cfg.max_dim + 1))
        out.append(_check(f"chain_map[{f.name}]", rep.passed, report=rep.to_json()))
    for f in (maps[0], maps[3]):
        for n in range(top + 1):
            iso, mat, a, b = cm.induces_isomorphism(f, n)
            out.append(_check(f"induces_isomorphism[{f.name},{n}]", iso, source_dim=a, target_dim=b,
                              matrix=[[format_scalar(x) for x in row] for row in mat]))
    return out


def _averaging_checks(X, cfg: RunConfig, top: int) -> list[dict]:
    from .homology import class_equal
    r = cfg.r if cfg.r is not None else cfg.d
    T = build_twisted_space(X, r)
    Q = build_power_quotient(T)
    target = cm.averaging_target(T, cfg.d)
    src = get_chain_complex(T, Theory.TWISTED_CYCLIC)
    tgt = get_chain_complex(target, Theory.TWISTED_CYCLIC)
    q, a = cm.quotient_map(T, Q), None
    a = cm.averaging_psi(Q, target)
    comp, inc = a.compose(q), cm.inclusion(src, tgt)
    out = []
    for f in (q, a):
        rep = cm.verify_chain_map(f, range(top + 2))
        out.append(_check(f"chain_map[{f.name}]", rep.passed, report=rep.to_json()))
    for n in range(top + 1):
        H = homology(src, n)
        ok = all(class_equal(comp(z), inc(z)) for z in H.cycle_basis)
        out.append(_check(f"average_after_quotient_is_identity[{n}]", ok, betti=H.betti,
                          target_scale=format_scalar(cm.averaging_scale(T))))
    return out


def _chern_checks(cfg: RunConfig) -> list[dict]:
    metric = cfg.metric()
    p = _load_pair(cfg, metric)
    rng = random.Random(cfg.seed)
    out = [_check("idempotent_pair", ch.is_idempotent_pair(p))]
    if not out[0]["passed"]:
        return out
    prop = ch.propagation(p.q, metric)
    degrees = [cfg.n] if cfg.n is not None else [0, 2]
    classes = {}
    for n in degrees:
        d = (n + 1) * prop
        for twisted in (False, True):
            tag = f"{'twisted' if twisted else 'torsion_free'},n={n}"
            c = ch.chern(p, n, d, metric, twisted)
            classes[(twisted, n)] = c
            diam = ch.support_diameter(c)
            out.append(_check(f"chern_cycle[{tag}]", True))
            out.append(_check(f"locality[{tag}]", diam <= (n + 1) * prop,
                              support_diameter=format_scalar(diam)))
            u = ch.random_invertible(p.m, rng)
            pc = ch.conjugate_pair(p, u)
            out.append(_check(f"conjugation_invariance[{tag}]",
                              ch.chern_class_compare(c, ch.chern(pc, n, d, metric, twisted))))
            both = ch.chern(ch.block_sum(p, pc), n, d, metric, twisted)
            cc = ch.chern(pc, n, d, metric, twisted)
            additive = all((c.components[k] + cc.components[k].transport(c.components[k].space)).coeffs
                           == both.components[k].transport(c.components[k].space).coeffs
                           for k in c.components)
            out.append(_check(f"block_sum_additivity[{tag}]", additive))
            shifted = ch.chern(ch.block_sum(p, ch.trivial_pair(p.group, 1, metric)), n, d, metric, twisted)
            if 0 in c.components:
                plain = ch.compare_by_degree(shifted, c)
                fixed = ch.compare_by_degree(shifted, ch.shift_by_units(c, 1))
                ok = (not plain[0]) and all(v for k, v in plain.items() if k) and all(fixed.values())
                out.append(_check(f"rank_shift_in_degree_0[{tag}]", ok))
    if (False, 0) in classes and (False, 2) in classes:
        coh = ch.truncation_coherent(classes[(False, 2)], classes[(False, 0)])
        out.append(_check("truncation_coherence[2->0]", all(coh.values())))
    return out


def cmd_verify(cfg: RunConfig) -> tuple[dict, bool]:
    X = _rips(cfg)
    top = cfg.max_dim - 1
    checks = _boundary_checks(X, cfg)
    if top >= 0:
        checks += _dimension_checks(X, top)
        checks += _chain_map_checks(X, cfg, top)
        checks += _averaging_checks(X, cfg, top)
    checks += _chern_checks(cfg)
    ok = all(c["passed"] for c in checks)
    failed = [c["name"] for c in checks if not c["passed"]]
    return {**_header(cfg), "seed": cfg.seed, "passed": ok, "failed": failed, "checks": checks}, ok


COMMANDS = {"rips": cmd_rips, "homology": cmd_homology, "chern": cmd_chern, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chernlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--group", required=True, help="cyclic:N, sym:N or product:[A,B]")
        p.add_argument("--gens", help="generator labels or indices, comma separated")
        p.add_argument("--d", help="Rips scale (rational)")
        p.add_argument("--max-dim", type=int, default=2, dest="max_dim",
                       help="dimension cap; homology is reported below it")
        p.add_argument("--out", help="write JSON here instead of stdout")
        p.add_argument("--seed", type=int, default=0)
        if name in ("homology", "chern", "verify"):
            p.add_argument("--theory", choices=[t.value for t in Theory])
            p.add_argument("--r", help="twist scale for twisted theories (defaults to --d)")
        if name == "homology":
            eq = p.add_mutually_exclusive_group()
            eq.add_argument("--equivariant", action="store_true", default=None)
            eq.add_argument("--no-equivariant", action="store_false", dest="equivariant")
        if name in ("chern", "verify"):
            p.add_argument("--kernel", help="kernel JSON file; defaults to the group averaging idempotent")
            p.add_argument("--n", type=int, help="Chern degree (even)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out) if args.out else None
    try:
        cfg = RunConfig.from_args(args)
        payload, ok = COMMANDS[args.command](cfg)
    except (ConfigError, GroupError, ComplexError, ChainError, ch.ChernError, MatrixCapExceeded,
            ValueError, OSError) as exc:
        _emit({"command": args.command, "passed": False,
               "error": {"type": type(exc).__name__, "message": str(exc)}}, out)
        return EXIT_ERROR
    _emit({"command": args.command, **payload}, out)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
