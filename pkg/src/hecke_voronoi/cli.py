"""Command line front end.

Every command prints one JSON document.  Timing lives under the ``timing``
key so the rest of the report is byte-identical across runs.  Errors are
reported as ``{"error": {...}}`` with a nonzero exit status.

Set ``HECKE_VORONOI_CACHE`` to a directory to keep finished homology and
Hecke reports between runs.
"""
import argparse
import hashlib
import json
import os
import random
import sys
import time
from fractions import Fraction

from . import linalg as la
from . import model
from . import oracle
from . import chains as ch
from . import hecke
from . import reduction as red
from . import cones

CACHE_ENV = "HECKE_VORONOI_CACHE"
GROUPS = {"SL2": 2, "GL2": 2, "SL3": 3}


class JobError(Exception):
    pass


def version():
    try:
        from importlib.metadata import version as v
        return v("artifact")
    except Exception:
        return "0.1.0"


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _group(args):
    if args.group not in GROUPS:
        raise JobError(f"unsupported group {args.group}; use SL2, GL2 or SL3")
    if args.level is None or args.level < 1:
        raise JobError("--level must be a positive integer")
    return model.Gamma0(GROUPS[args.group], args.level)


def parse_chain(text, n=None):
    """Chain file: one term per line, ``coeff : v1 ; v2 ; ...`` with vi comma separated.

    Blank lines and lines starting with # are ignored.  Returns a cusp chain.
    """
    out = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" in line:
            c, rest = line.split(":", 1)
            coeff = int(c)
        else:
            coeff, rest = 1, line
        vs = [tuple(int(a) for a in part.split(",")) for part in rest.split(";")]
        if n is not None and any(len(v) != n for v in vs):
            raise JobError(f"vectors must have {n} entries: {line}")
        if any(not any(v) for v in vs):
            raise JobError(f"zero vector in chain term: {line}")
        key = ch.cusp_cone([model.normalize_cusp(v) for v in vs])
        out[key] = out.get(key, 0) + coeff
    return {k: v for k, v in out.items() if v}


def chain_to_json(xi):
    terms = []
    for key, c in sorted(xi.items()):
        cus = ch.cusps_of_cone(key)
        terms.append({"coeff": c, "cusps": [list(v) for v in cus] if cus else None,
                      "forms": None if cus else [list(f) for f in key]})
    return terms


# --- commands ---------------------------------------------------------------------

def cmd_oracle(args):
    n = GROUPS.get(args.group)
    if n is None:
        raise JobError(f"unsupported group {args.group}")
    x = [Fraction(a) for a in args.form.split(",")]
    if len(x) != model.dim_v(n):
        raise JobError(f"a form for {args.group} has {model.dim_v(n)} coordinates")
    ans = oracle.reduce(x)
    return {"cusps": ans.cusps, "gamma": ans.gamma, "face": ans.face, "coords": ans.coords,
            "rank": ans.rank, "steps": ans.steps, "potentials": ans.potentials}


def cmd_homology(args):
    G = _group(args)
    cx = ch.build_voronoi_complex(G)
    degrees = [args.degree] if args.degree is not None else cx.degrees()
    out = {"cells": cx.summary(), "homology": {}}
    for d in degrees:
        if d not in cx.cells:
            raise JobError(f"no cells in degree {d}")
        out["homology"][str(d)] = ch.homology(cx, d).to_json()
    return out


def cmd_reduce(args):
    G = _group(args)
    if not args.chain:
        raise JobError("reduce needs --chain FILE")
    with open(args.chain) as fh:
        xi = parse_chain(fh.read(), G.n)
    stats = red.Stats()
    result = {}
    out = red.reduce_chain(xi, args.algorithm, G, stats, args.max_subdiv)
    cx = ch.build_voronoi_complex(G)
    tag = ch.is_relative_cycle(out, cx)
    result["reduced"] = chain_to_json(out)
    result["voronoi"] = red.is_voronoi_chain(out)
    result["relative_cycle"] = tag.is_cycle
    result["stats"] = stats.to_json()
    if tag.is_cycle and all(len(k) == G.n for k in out):
        pres = ch.homology(cx, G.n - 1)
        result["class"] = pres.express(out)
    if args.witness:
        if str(args.algorithm) != "1":
            raise JobError("--witness is available with --algorithm 1")
        wit = []
        for key, c in sorted(xi.items()):
            W = red.algorithm1_witness(ch.cusps_of_cone(key))
            wit.append({"term": [list(v) for v in ch.cusps_of_cone(key)], "coeff": c,
                        "eta_terms": len(W.eta), "mu_terms": len(W.mu), "identity_holds": W.check(),
                        "eta": [{"coeff": v, "forms": [list(f) for f in k]} for k, v in sorted(W.eta.items())]})
        result["witness"] = wit
    return result


def cmd_hecke(args):
    G = _group(args)
    if args.p is None:
        raise JobError("hecke needs --p")
    if not hecke.is_prime(args.p):
        raise JobError(f"{args.p} is not prime")
    r = red.hecke_matrix(G, args.p, args.degree, args.algorithm, args.max_subdiv)
    out = r.to_json()
    out["charpoly"] = [int(c) if c.denominator == 1 else str(c) for c in r.charpoly]
    out["matrix"] = _jsonable(r.matrix)
    out["cosets"] = len(hecke.coset_decomposition(G, args.p))
    return out


def cmd_selftest(args):
    rng = random.Random(args.seed)
    checks = {}
    # barycentric counts
    ok = True
    for k in range(1, 4):
        gens = [tuple(int(i == j) for j in range(k + 1)) for i in range(k + 1)]
        F = cones.barycentric_subdivide(cones.fan_of_cone(gens))
        ok &= len(F.top_cones()) == [1, 2, 6, 24][k]
    checks["barycentric_counts"] = ok
    # oracle certificates
    ok = True
    for _ in range(50):
        a, c = rng.randint(1, 1000), rng.randint(1, 1000)
        b = rng.randint(-1000, 1000)
        if a * c - b * b <= 0:
            continue
        ans = oracle.reduce((a, c, b))
        g = [list(r) for r in ans.gamma]
        pts = [model.q(v) for v in ans.certified_cusps()]
        y = [sum(t * p[i] for t, p in zip(ans.coords, pts)) for i in range(3)]
        ok &= y == [a, c, b] and all(t > 0 for t in ans.coords) and la.det(g) == 1
    checks["oracle_certificates"] = ok
    # Ash-Rudolph determinants
    ok = True
    for _ in range(20):
        vs = [tuple(rng.randint(-9, 9) for _ in range(2)) for _ in range(2)]
        if la.det([list(v) for v in vs]) == 0 or any(la.content(v) != 1 for v in vs):
            continue
        st = red.Stats()
        out = red.ash_rudolph_reduce(vs, st)
        ok &= all(abs(la.det([list(v) for v in ch.cusps_of_cone(k)])) == 1 for k in out)
    checks["ash_rudolph"] = ok
    # T2 at level 11
    r = red.hecke_matrix(model.Gamma0(2, 11), 2, algorithm="2")
    checks["hecke_level_11"] = [int(c) for c in r.charpoly] == [1, 1, -8, -12]
    if not all(checks.values()):
        raise JobError(f"selftest failed: {sorted(k for k, v in checks.items() if not v)}")
    return {"checks": checks, "seed": args.seed}


COMMANDS = {"oracle": cmd_oracle, "homology": cmd_homology, "reduce": cmd_reduce,
            "hecke": cmd_hecke, "selftest": cmd_selftest}


def build_parser():
    p = argparse.ArgumentParser(prog="hecke-voronoi",
                                description="Hecke operators on Voronoi homology of Gamma_0(N) in SL_n(Z).")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, level=True):
        sp.add_argument("--group", default="SL2", help="SL2, GL2 (same as SL2) or SL3")
        if level:
            sp.add_argument("--level", type=int, default=1)
        sp.add_argument("--output", help="write the JSON report here")
        sp.add_argument("--human", action="store_true", help="short readable summary")
        sp.add_argument("--seed", type=int, default=0)

    o = sub.add_parser("oracle", help="smallest Voronoi cone containing a form")
    common(o, level=False)
    o.add_argument("--form", required=True, help="comma separated coordinates, diagonal first")
    h = sub.add_parser("homology", help="relative homology of the Voronoi complex")
    common(h)
    h.add_argument("--degree", type=int)
    r = sub.add_parser("reduce", help="reduce a chain of cusp cones to Voronoi cones")
    common(r)
    r.add_argument("--chain", help="chain file")
    r.add_argument("--algorithm", choices=["1", "2", "ar"], default="2")
    r.add_argument("--witness", action="store_true", help="emit the homotopy eta (algorithm 1)")
    r.add_argument("--max-subdiv", type=int, default=red.DEFAULT_CAP)
    k = sub.add_parser("hecke", help="matrix and characteristic polynomial of T_p")
    common(k)
    k.add_argument("--p", type=int)
    k.add_argument("--degree", type=int)
    k.add_argument("--algorithm", choices=["1", "2", "ar"], default="2")
    k.add_argument("--max-subdiv", type=int, default=red.DEFAULT_CAP)
    s = sub.add_parser("selftest", help="run quick invariant checks")
    common(s, level=False)
    return p


def _job_echo(args):
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("output", "human")}


def _cache_path(job):
    d = os.environ.get(CACHE_ENV)
    if not d or job["command"] not in ("homology", "hecke"):
        return None
    key = hashlib.sha256(json.dumps(job, sort_keys=True).encode()).hexdigest()[:24]
    return os.path.join(d, f"{job['command']}-{key}.json")


def _human(report):
    if "error" in report:
        e = report["error"]
        return f"error ({e['type']}): {e['message']}"
    res = report["result"]
    job = report["input"]
    lines = [f"{job['command']} ({job.get('group')}, level {job.get('level', '-')})"]
    if job["command"] == "hecke":
        lines.append(f"T_{res['p']} on H_{res['degree']}: rank {res['rank']}")
        for row in res["matrix"]:
            lines.append("  " + " ".join(f"{x:>6}" for x in map(str, row)))
        lines.append("charpoly coefficients: " + " ".join(map(str, res["charpoly"])))
    elif job["command"] == "homology":
        for d, h in res["homology"].items():
            lines.append(f"H_{d}: rank {h['rank']}, torsion {h['torsion']}")
    else:
        lines.append(json.dumps(res, sort_keys=True)[:2000])
    return "\n".join(lines)


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    job = _job_echo(args)
    report = {"input": job, "version": version()}
    t0 = time.perf_counter()
    status = 0
    try:
        path = _cache_path(job)
        if path and os.path.exists(path):
            with open(path) as fh:
                result = json.load(fh)
        else:
            result = _jsonable(COMMANDS[args.command](args))
            if path:
                os.makedirs(os.path.dirname(path), exist_ok=True)
                with open(path, "w") as fh:
                    json.dump(result, fh, sort_keys=True)
        report["result"] = result
    except (JobError, ValueError, ArithmeticError, NotImplementedError, AssertionError,
            RuntimeError, OSError) as e:
        report["error"] = {"type": type(e).__name__, "message": str(e)}
        status = 2
    report["timing"] = {"seconds": round(time.perf_counter() - t0, 3)}
    text = _human(report) if args.human else json.dumps(report, sort_keys=True)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
