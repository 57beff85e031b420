"""Command-line front end.

Subcommands: ``metric eval``, ``geodesic shoot|connect``,
``billiard orbit|phase-portrait|poncelet``,
``string build|diffeo|poritsky|graves|reconstruct``,
``net ivory|classify``, ``suite run``.

Charts and curves are given as JSON specs (inline, or a path to a JSON
file, or the shorthand ``builder:key=val,key=val``).  CSV is used for
trajectories and curves, JSON for reports.  Exit codes: 0 success,
1 check failure, 2 configuration or domain error.
"""

from __future__ import annotations

import csv
import functools
import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import billiard, net, poritsky, string_construction as strings
from .config import ExperimentConfig
from .curves import confocal_ellipse, curve_from_spec
from .errors import CausticsError
from .geodesic import _chord_length_estimate, geodesic_bvp, shoot
from .metric import chart_from_spec, eval_metric, euclidean_cartesian

EXIT_CHECK_FAILURE = 1
EXIT_CONFIG_ERROR = 2


def _parse_spec(text: str, default_key: str) -> dict:
    """Inline JSON, a JSON file path, or ``name:key=val,...`` shorthand."""
    text = text.strip()
    if text.startswith("{"):
        return json.loads(text)
    if text.endswith(".json") and Path(text).exists():
        return json.loads(Path(text).read_text())
    name, _, rest = text.partition(":")
    params = {}
    if rest:
        # split on commas outside brackets so list values survive
        items, depth, start = [], 0, 0
        for i, ch in enumerate(rest):
            if ch in "[(":
                depth += 1
            elif ch in ")]":
                depth -= 1
            elif ch == "," and depth == 0:
                items.append(rest[start:i])
                start = i + 1
        items.append(rest[start:])
        for item in items:
            key, _, val = item.partition("=")
            try:
                params[key.strip()] = json.loads(val)
            except json.JSONDecodeError:
                params[key.strip()] = val.strip()
    if default_key == "builder":
        return {"builder": name, "params": params}
    return {default_key: name, **params}


def _chart(text: str):
    return chart_from_spec(_parse_spec(text, "builder"))


def _curve(chart, text: str):
    return curve_from_spec(chart, _parse_spec(text, "curve"))


def _floats(text: str) -> list:
    return [float(x) for x in text.split(",")]


def _emit_json(data, out):
    payload = json.dumps(data, indent=2, sort_keys=True, default=float)
    if out:
        Path(out).write_text(payload + "\n")
    else:
        click.echo(payload)


def _emit_csv(header, rows, out):
    def fmt(x):
        if isinstance(x, float):
            return format(x, ".17g")
        return x

    if out:
        fh = open(out, "w", newline="")
    else:
        fh = sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) for x in row])
    finally:
        if out:
            fh.close()


def _domain_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kw):
        try:
            return fn(*args, **kw)
        except (CausticsError, ValueError, KeyError, OSError,
                json.JSONDecodeError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_CONFIG_ERROR)
    return wrapper


@click.group()
def main():
    """Billiard caustics, string constructions, and Liouville nets."""


# ---------------------------------------------------------------------------
# metric


@main.group()
def metric():
    """Metric chart queries."""


@metric.command("eval")
@click.option("--chart", "chart_spec", required=True)
@click.option("--point", required=True, help="u,v")
@click.option("--out", default=None)
@_domain_errors
def metric_eval(chart_spec, point, out):
    """Metric coefficients at a chart point."""
    chart = _chart(chart_spec)
    g11, g12, g22 = eval_metric(chart, _floats(point))
    _emit_json({"point": _floats(point), "g11": g11, "g12": g12,
                "g22": g22}, out)


# ---------------------------------------------------------------------------
# geodesic


@main.group()
def geodesic():
    """Geodesic initial- and boundary-value problems."""


@geodesic.command("shoot")
@click.option("--chart", "chart_spec", required=True)
@click.option("--point", required=True, help="u,v")
@click.option("--direction", required=True, help="du,dv")
@click.option("--length", type=float, required=True)
@click.option("--samples", type=int, default=100)
@click.option("--out", default=None)
@_domain_errors
def geodesic_shoot(chart_spec, point, direction, length, samples, out):
    """Integrate a geodesic and emit its samples as CSV."""
    chart = _chart(chart_spec)
    path = shoot(chart, _floats(point), _floats(direction), length)
    data = path.sample(samples)
    _emit_csv(["s", "u", "v", "du", "dv"],
              [[float(x) for x in row] for row in data], out)


@geodesic.command("connect")
@click.option("--chart", "chart_spec", required=True)
@click.option("--from", "src", required=True, help="u,v")
@click.option("--to", "dst", required=True, help="u,v")
@click.option("--radius", type=float, default=None,
              help="convexity radius override (default: 3x chord estimate)")
@click.option("--out", default=None)
@_domain_errors
def geodesic_connect(chart_spec, src, dst, radius, out):
    """Solve the two-point boundary value problem; report the length."""
    chart = _chart(chart_spec)
    A, B = np.array(_floats(src)), np.array(_floats(dst))
    if radius is None:
        radius = 3.0 * _chord_length_estimate(chart, A, B)
    path = geodesic_bvp(chart, A, B, convexity_radius=radius)
    st = path.start
    _emit_json({"from": _floats(src), "to": _floats(dst),
                "length": path.length,
                "initial_direction": [float(x) for x in st.velocity]}, out)


# ---------------------------------------------------------------------------
# billiard


@main.group(name="billiard")
def billiard_group():
    """Billiard ball map experiments."""


@billiard_group.command("orbit")
@click.option("--chart", "chart_spec", required=True)
@click.option("--table", "table_spec", required=True)
@click.option("--s0", type=float, default=0.0)
@click.option("--p0", type=float, required=True)
@click.option("-n", "--iterations", type=int, default=100)
@click.option("--out", default=None)
@_domain_errors
def billiard_orbit(chart_spec, table_spec, s0, p0, iterations, out):
    """Iterate the billiard map from one phase point; emit (k, s, p)."""
    chart = _chart(chart_spec)
    table = _curve(chart, table_spec)
    phi = billiard.PhasePoint(s0, p0)
    rows = [[0, phi.s, phi.p]]
    for k in range(1, iterations + 1):
        phi = billiard.billiard_map(table, phi)
        rows.append([k, phi.s, phi.p])
    _emit_csv(["k", "s", "p"], rows, out)


@billiard_group.command("phase-portrait")
@click.option("--chart", "chart_spec", required=True)
@click.option("--table", "table_spec", required=True)
@click.option("--p-min", type=float, default=0.05)
@click.option("--p-max", type=float, default=0.95)
@click.option("--orbits", type=int, default=20)
@click.option("-n", "--iterations", type=int, default=200)
@click.option("--out", default=None)
@_domain_errors
def billiard_phase_portrait(chart_spec, table_spec, p_min, p_max, orbits,
                            iterations, out):
    """Orbits over a grid of initial momenta; columns (orbit, k, s, p).

    Per-row failures are recorded in the ``error`` column and the run
    continues.
    """
    chart = _chart(chart_spec)
    table = _curve(chart, table_spec)
    rows = []
    for idx, p0 in enumerate(np.linspace(p_min, p_max, orbits)):
        phi = billiard.PhasePoint(0.0, float(p0))
        rows.append([idx, 0, phi.s, phi.p, ""])
        for k in range(1, iterations + 1):
            try:
                phi = billiard.billiard_map(table, phi)
            except CausticsError as exc:
                rows.append([idx, k, math.nan, math.nan, str(exc)])
                break
            rows.append([idx, k, phi.s, phi.p, ""])
    _emit_csv(["orbit", "k", "s", "p", "error"], rows, out)


@billiard_group.command("poncelet")
@click.option("--chart", "chart_spec", required=True)
@click.option("--table", "table_spec", required=True)
@click.option("--caustic", "caustic_spec", required=True)
@click.option("-n", "--period", type=int, required=True)
@click.option("--tol", type=float, default=1e-6)
@click.option("--out", default=None)
@_domain_errors
def billiard_poncelet(chart_spec, table_spec, caustic_spec, period, tol, out):
    """Search for an n-periodic orbit tangent to the caustic."""
    chart = _chart(chart_spec)
    table = _curve(chart, table_spec)
    caustic = _curve(chart, caustic_spec)
    phi = billiard.poncelet_search(table, caustic, period, tol=tol)
    found = phi is not None
    report = {"period": period, "found": found}
    if found:
        report["s"] = phi.s
        report["p"] = phi.p
        report["closure_residual"] = billiard.closure_residual(
            table, phi, period)
    _emit_json(report, out)
    if not found:
        sys.exit(EXIT_CHECK_FAILURE)


# ---------------------------------------------------------------------------
# string


@main.group(name="string")
def string_group():
    """String construction, Graves, and Poritsky experiments."""


@string_group.command("build")
@click.option("--chart", "chart_spec", required=True)
@click.option("--caustic", "caustic_spec", required=True)
@click.option("-p", "--excess", type=float, required=True)
@click.option("--grid", type=int, default=64)
@click.option("--out", default=None)
@_domain_errors
def string_build(chart_spec, caustic_spec, excess, grid, out):
    """Sample the string curve of a given excess; emit (A, u, v)."""
    chart = _chart(chart_spec)
    caustic = _curve(chart, caustic_spec)
    built = strings.string_curve(caustic, excess, grid)
    rows = [[rec.A_param, float(rec.C[0]), float(rec.C[1])]
            for rec in built.records]
    _emit_csv(["A_param", "u", "v"], rows, out)


@string_group.command("diffeo")
@click.option("--chart", "chart_spec", required=True)
@click.option("--caustic", "caustic_spec", required=True)
@click.option("-p", "--excess", type=float, required=True)
@click.option("--a-param", type=float, required=True)
@click.option("--out", default=None)
@_domain_errors
def string_diffeo_cmd(chart_spec, caustic_spec, excess, a_param, out):
    """Image of one caustic parameter under the string diffeomorphism."""
    chart = _chart(chart_spec)
    caustic = _curve(chart, caustic_spec)
    b = strings.string_diffeo(caustic, excess, a_param)
    rec = strings.string_excess(caustic, a_param, b)
    _emit_json({"A_param": a_param, "B_param": b, "excess": rec.excess,
                "C": [float(x) for x in rec.C]}, out)


@string_group.command("graves")
@click.option("--chart", "chart_spec", required=True)
@click.option("--caustic", "caustic_spec", required=True)
@click.option("--outer", "outer_spec", required=True)
@click.option("--grid", type=int, default=48)
@click.option("--tol", type=float, default=1e-6)
@click.option("--out", default=None)
@_domain_errors
def string_graves(chart_spec, caustic_spec, outer_spec, grid, tol, out):
    """Distance of the matched string curve of the caustic from the outer
    leaf."""
    chart = _chart(chart_spec)
    inner = _curve(chart, caustic_spec)
    outer = _curve(chart, outer_spec)
    residual = strings.graves_check([inner, outer], 0, 1, grid=grid)
    _emit_json({"residual": residual, "tol": tol,
                "passed": bool(residual < tol)}, out)
    if residual >= tol:
        sys.exit(EXIT_CHECK_FAILURE)


@string_group.command("poritsky")
@click.option("--chart", "chart_spec", required=True)
@click.option("--caustic", "caustic_spec", required=True)
@click.option("--p-ref", type=float, required=True)
@click.option("-N", "--orbit-length", type=int, default=100_000)
@click.option("--p-list", default="0.01,0.02,0.05")
@click.option("--tol", type=float, default=1e-4)
@click.option("--out", default=None)
@_domain_errors
def string_poritsky(chart_spec, caustic_spec, p_ref, orbit_length, p_list,
                    tol, out):
    """Construct the Poritsky parameter and measure the shift defect."""
    chart = _chart(chart_spec)
    caustic = _curve(chart, caustic_spec)
    param = poritsky.poritsky_parameter(caustic, p_ref, N=orbit_length)
    defect = poritsky.poritsky_check(caustic, param, _floats(p_list),
                                     use_smooth=True)
    _emit_json({"p_ref": p_ref, "rho": param.rho, "defect": defect,
                "tol": tol, "passed": bool(defect < tol)}, out)
    if defect >= tol:
        sys.exit(EXIT_CHECK_FAILURE)


@string_group.command("reconstruct")
@click.option("--chart", "chart_spec", required=True)
@click.option("--caustic", "caustic_spec", required=True)
@click.option("--p-ref", type=float, required=True)
@click.option("-N", "--orbit-length", type=int, default=100_000)
@click.option("--nx", type=int, default=128)
@click.option("--ny", type=int, default=17)
@click.option("--y-min", type=float, default=0.05)
@click.option("--y-max", type=float, default=0.10)
@click.option("--out", default=None)
@_domain_errors
def string_reconstruct(chart_spec, caustic_spec, p_ref, orbit_length, nx, ny,
                       y_min, y_max, out):
    """Reconstruct a Liouville chart near the caustic; emit diagnostics."""
    chart = _chart(chart_spec)
    caustic = _curve(chart, caustic_spec)
    param = poritsky.poritsky_parameter(caustic, p_ref, N=orbit_length)
    recon = poritsky.poritsky_to_liouville(
        caustic, param,
        grid={"nx": nx, "ny": ny, "y_min": y_min, "y_max": y_max})
    _emit_json({"p_ref": p_ref, "rho": param.rho,
                "diagnostics": recon.diagnostics}, out)


# ---------------------------------------------------------------------------
# net


@main.group(name="net")
def net_group():
    """Ivory property and planar net classification."""


@net_group.command("ivory")
@click.option("--chart", "chart_spec", required=True)
@click.option("--quad", required=True, help="u1,u2,v1,v2")
@click.option("--tol", type=float, default=1e-6)
@click.option("--out", default=None)
@_domain_errors
def net_ivory(chart_spec, quad, tol, out):
    """Compare the two geodesic diagonals of a coordinate rectangle."""
    chart = _chart(chart_spec)
    u1, u2, v1, v2 = _floats(quad)
    res = net.ivory_check(chart, net.NetQuad(u1, u2, v1, v2))
    _emit_json({"L_plus": res.L_plus, "L_minus": res.L_minus,
                "defect": res.defect, "tol": tol,
                "passed": bool(res.defect < tol)}, out)
    if res.defect >= tol:
        sys.exit(EXIT_CHECK_FAILURE)


@net_group.command("classify")
@click.option("--in", "in_path", required=True,
              help="CSV with rows (u, v, x, y) on a rectangular grid")
@click.option("--out", default=None)
@_domain_errors
def net_classify(in_path, out):
    """Classify a sampled planar orthogonal net."""
    rows = np.loadtxt(in_path, delimiter=",", skiprows=1)
    us = np.unique(rows[:, 0])
    vs = np.unique(rows[:, 1])
    xy = np.full((len(us), len(vs), 2), np.nan)
    iu = np.searchsorted(us, rows[:, 0])
    iv = np.searchsorted(vs, rows[:, 1])
    xy[iu, iv] = rows[:, 2:4]
    if np.isnan(xy).any():
        raise click.ClickException("samples do not form a full grid")
    result = net.classify_planar_net(net.SampledNet(us, vs, xy))
    _emit_json({"type": result.net_type, "params": result.params,
                "residuals": result.residuals}, out)
    if result.net_type == "unclassified":
        sys.exit(EXIT_CHECK_FAILURE)


# ---------------------------------------------------------------------------
# suite


def _default_curve_spec(chart):
    if chart.name == "confocal_elliptic":
        return {"curve": "confocal_ellipse", "a": chart.params["a"],
                "b": chart.params["b"], "lam": 0.0}
    return None


def _suite_checks(cfg: ExperimentConfig):
    chart = chart_from_spec(cfg.chart)
    params = cfg.params
    rng = np.random.default_rng(cfg.seed)
    curve_spec = cfg.curve or _default_curve_spec(chart)
    # the confocal coordinate chart describes a planar metric: its billiard
    # and string experiments live on the Euclidean plane, its Ivory check on
    # the coordinate rectangle itself
    if chart.name == "confocal_elliptic":
        a = chart.params["a"]
        work_chart = euclidean_cartesian((-3 * math.sqrt(a),
                                          3 * math.sqrt(a),
                                          -3 * math.sqrt(a),
                                          3 * math.sqrt(a)))
    else:
        work_chart = chart
    results = []

    def record(name, fn, tol):
        try:
            residual = fn()
        except CausticsError as exc:
            results.append({"check": name, "passed": False,
                            "error": f"{type(exc).__name__}: {exc}"})
            return
        results.append({"check": name, "passed": bool(residual < tol),
                        "residual": float(residual), "tol": tol})

    def need_curve():
        if curve_spec is None:
            raise CausticsError("no curve spec for this chart")
        return curve_from_spec(work_chart, curve_spec)

    def check_graves():
        inner = need_curve()
        if chart.name == "confocal_elliptic":
            a, b = chart.params["a"], chart.params["b"]
            outer = confocal_ellipse(work_chart, a, b, 0.15 * (a - b))
        else:
            raise CausticsError("graves suite check needs a confocal chart "
                                "or an explicit outer leaf")
        return strings.graves_check([inner, outer], 0, 1,
                                    grid=int(params["grid"]))

    def check_poritsky():
        caustic = need_curve()
        param = poritsky.poritsky_parameter(caustic, params["p_ref"],
                                            N=int(params["N"]))
        return poritsky.poritsky_check(caustic, param, params["p_list"],
                                       use_smooth=True)

    def check_ivory():
        u_lo, v_lo = chart.u_min, chart.v_min
        du, dv = chart.spans
        worst = 0.0
        for _ in range(5):
            u1 = u_lo + du * (0.15 + 0.5 * rng.random())
            v1 = v_lo + dv * (0.15 + 0.5 * rng.random())
            quad = net.NetQuad(u1, u1 + 0.1 * du, v1, v1 + 0.1 * dv)
            worst = max(worst, net.ivory_check(chart, quad).defect)
        return worst

    def check_reconstruction():
        caustic = need_curve()
        param = poritsky.poritsky_parameter(caustic, params["p_ref"],
                                            N=int(params["N"]))
        recon = poritsky.poritsky_to_liouville(caustic, param)
        return max(recon.diagnostics.values())

    record("graves", check_graves, params.get("tol_graves", 1e-6))
    record("poritsky", check_poritsky, params.get("tol_poritsky", 1e-4))
    record("ivory", check_ivory, params.get("tol_ivory", 1e-6))
    record("reconstruction", check_reconstruction,
           params.get("tol_reconstruction", 1e-3))
    return results


@main.group(name="suite")
def suite_group():
    """Batch check suites."""


@suite_group.command("run")
@click.option("--config", "config_path", required=True)
@click.option("--out", default=None)
@_domain_errors
def suite_run(config_path, out):
    """Run the Graves / Poritsky / Ivory / reconstruction suite."""
    cfg = ExperimentConfig.from_file(config_path)
    results = _suite_checks(cfg)
    passed = all(r["passed"] for r in results)
    _emit_json({"name": cfg.name, "passed": passed, "checks": results},
               cfg.out or out)
    if not passed:
        sys.exit(EXIT_CHECK_FAILURE)


if __name__ == "__main__":
    main()
