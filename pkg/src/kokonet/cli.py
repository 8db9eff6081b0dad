"""Command-line interface: the design workflow end to end.

Subcommands: qs (closed-form quasi-symmetric nets), classify, flex (trace a
flexion from a starting state), search (multi-start discovery), check
(validate a bundle and test self-intersection), serve (local HTTP API).

Angles on the command line are degrees by default; a ``rad`` suffix switches
to radians (``--alpha 105deg``, ``--alpha 1.83rad``).
"""
from __future__ import annotations

import json
import math
import os
import sys

import click

from . import qsnet
from .angles import NetAngles, VertexGermAngles, net_from_germs
from .classify import PUBLISHED_DIGITS_TOL, classify
from .errors import KokonetError
from .geometry import (
    BundleSample,
    FlexionBundle,
    auto_edge_lengths,
    congruence_deviation,
    embed,
    export_bundle,
    export_obj,
    load_bundle,
    measure_dihedrals,
    measure_flat_angles,
    self_intersects,
)
from .kinematics import angle_distance, flexion_trace, propagate_best
from .search import export_solutions, load_config, run_search

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def parse_angle(text: str) -> float:
    """Angle with optional unit suffix; bare numbers are degrees."""
    t = text.strip().lower()
    if t.endswith("rad"):
        return float(t[:-3])
    if t.endswith("deg"):
        return float(t[:-3]) * math.pi / 180.0
    return float(t) * math.pi / 180.0


ANGLE = click.UNPROCESSED


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def load_net_file(path: str) -> NetAngles:
    """Net JSON: {"angles": {"alpha": [4], ...}, "unit": "deg"|"rad"}."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read net file {path!r}: {exc}")
    except json.JSONDecodeError as exc:
        _fail(EXIT_IO, f"net file {path!r} is not valid JSON: {exc}")
    return net_from_dict(data)


def net_from_dict(data: dict) -> NetAngles:
    ang = data["angles"]
    scale = 1.0 if data.get("unit", "deg") == "rad" else math.pi / 180.0
    germs = [
        VertexGermAngles(
            ang["alpha"][i] * scale, ang["beta"][i] * scale,
            ang["gamma"][i] * scale, ang["delta"][i] * scale,
        )
        for i in range(4)
    ]
    return net_from_germs(germs)


def net_to_dict(net: NetAngles) -> dict:
    return {
        "angles": {
            "alpha": list(net.alphas()), "beta": list(net.betas()),
            "gamma": list(net.gammas()), "delta": list(net.deltas()),
        },
        "unit": "rad",
    }


@click.group()
def main() -> None:
    """Design, classify, flex and export flexible Kokotsakis nets."""


@main.command("qs")
@click.option("--alpha", required=True, type=str, help="alpha_1 (e.g. 105deg)")
@click.option("--beta", required=True, type=str, help="beta_1")
@click.option("--gamma", required=True, type=str, help="gamma_1")
@click.option("--branch", type=click.Choice(["+", "-"]), default="+", show_default=True)
@click.option("--samples", type=int, default=25, show_default=True)
@click.option("--t-min", type=float, default=None, help="flexion parameter lower bound")
@click.option("--t-max", type=float, default=None, help="flexion parameter upper bound")
@click.option("--out", "out_path", type=str, default="qs_bundle.json", show_default=True)
@click.option("--obj-dir", type=str, default=None, help="also write one OBJ per sample")
def cmd_qs(alpha, beta, gamma, branch, samples, t_min, t_max, out_path, obj_dir) -> None:
    """Build a quasi-symmetric net, classify it, and export its flexion."""
    try:
        seed = qsnet.QsSeed(parse_angle(alpha), parse_angle(beta), parse_angle(gamma))
        net = qsnet.build_qs_net(seed)
    except (KokonetError, ValueError) as exc:
        _fail(EXIT_DOMAIN, f"{type(exc).__name__}: {exc}")

    report = classify(net)
    click.echo(json.dumps(report.to_json_dict(), indent=1))

    try:
        fl = qsnet.qs_flexion(net, +1 if branch == "+" else -1)
        if t_min is not None and t_max is not None:
            ts = [t_min + (t_max - t_min) * k / max(samples - 1, 1) for k in range(samples)]
        else:
            ts = qsnet.sample_parameters(fl, samples)
        lengths = auto_edge_lengths(net)
        bundle = FlexionBundle(net=net, lengths=lengths, branch=branch,
                               provenance="closed-form")
        for t in ts:
            state = qsnet.eval_flexion(fl, t)
            emb = embed(net, state, lengths)
            bundle.samples.append(BundleSample(t=t, state=state, embedded=emb))
        export_bundle(bundle, out_path)
        if obj_dir:
            os.makedirs(obj_dir, exist_ok=True)
            for k, s in enumerate(bundle.samples):
                export_obj(s.embedded, os.path.join(obj_dir, f"sample_{k:03d}.obj"), net)
    except KokonetError as exc:
        _fail(EXIT_NUMERIC, f"{type(exc).__name__}: {exc}")
    click.echo(f"wrote {len(bundle.samples)} samples to {out_path}")


@main.command("classify")
@click.argument("net_file", type=str)
@click.option("--tol", type=float, default=PUBLISHED_DIGITS_TOL, show_default=True,
              help="classification tolerance (use 1e-9 for closed-form input)")
def cmd_classify(net_file, tol) -> None:
    """Equimodular elliptic classification of a net file."""
    try:
        net = load_net_file(net_file)
    except (ValueError, KeyError) as exc:
        _fail(EXIT_DOMAIN, f"invalid net data: {exc}")
    report = classify(net, tol=tol)
    click.echo(json.dumps(report.to_json_dict(), indent=1))


@main.command("search")
@click.argument("config_file", type=str)
@click.option("--out", "out_path", type=str, default="solutions.json", show_default=True)
def cmd_search(config_file, out_path) -> None:
    """Run the multi-start search from a JSON/TOML configuration file."""
    try:
        cfg = load_config(config_file)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read config: {exc}")
    except (KeyError, ValueError, TypeError) as exc:
        _fail(EXIT_DOMAIN, f"invalid config: {exc}")
    outcome = run_search(cfg)
    try:
        export_solutions(outcome, out_path)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write solutions: {exc}")
    click.echo(json.dumps(outcome.stats_dict(), indent=1))
    click.echo(f"wrote {len(outcome.solutions)} solutions to {out_path}")


@main.command("flex")
@click.argument("net_file", type=str)
@click.option("--theta1", type=str, required=True, help="starting theta_1 (e.g. 130deg)")
@click.option("--t-min", type=float, required=True, help="cot(theta_1/2) range start")
@click.option("--t-max", type=float, required=True, help="cot(theta_1/2) range end")
@click.option("--steps", type=int, default=50, show_default=True)
@click.option("--out", "out_path", type=str, default="flex_bundle.json", show_default=True)
def cmd_flex(net_file, theta1, t_min, t_max, steps, out_path) -> None:
    """Trace the flexion of a net from a closing start state."""
    try:
        net = load_net_file(net_file)
    except (ValueError, KeyError) as exc:
        _fail(EXIT_DOMAIN, f"invalid net data: {exc}")
    try:
        th1 = parse_angle(theta1)
        state, res, _ = propagate_best(net, th1)
        if res > 1e-8:
            _fail(EXIT_DOMAIN, f"no closing state at theta1 (best residual {res:.3e})")
        trace = flexion_trace(net, state, (t_min, t_max), steps)
        lengths = auto_edge_lengths(net)
        bundle = FlexionBundle(net=net, lengths=lengths, branch="+",
                               provenance="traced")
        for t, st in trace.samples:
            bundle.samples.append(
                BundleSample(t=t, state=st, embedded=embed(net, st, lengths)))
        export_bundle(bundle, out_path)
        if trace.died_at is not None:
            click.echo(f"trace truncated at t={trace.died_at}: {trace.reason}")
    except KokonetError as exc:
        _fail(EXIT_NUMERIC, f"{type(exc).__name__}: {exc}")
    click.echo(f"wrote {len(bundle.samples)} samples to {out_path}")


def check_bundle(bundle: FlexionBundle) -> dict:
    """Validation + self-intersection report for a bundle (shared with serve)."""
    sample_reports = []
    for k, s in enumerate(bundle.samples):
        measured_state = measure_dihedrals(s.embedded)
        measured_net = measure_flat_angles(s.embedded)
        theta_err = max(angle_distance(a, b)
                        for a, b in zip(measured_state.theta, s.state.theta))
        flat_err = 0.0
        for i in range(1, 5):
            for attr in ("alpha", "beta", "gamma", "delta"):
                flat_err = max(flat_err, abs(
                    getattr(measured_net.germ(i), attr) - getattr(bundle.net.germ(i), attr)))
        sample_reports.append({
            "index": k,
            "t": s.t,
            "max_dihedral_error": theta_err,
            "max_flat_angle_error": flat_err,
            "self_intersects": self_intersects(s.embedded),
        })
    return {
        "n_samples": len(bundle.samples),
        "face_congruence_deviation": congruence_deviation(bundle),
        "classification": classify(bundle.net).to_json_dict(),
        "samples": sample_reports,
        "any_self_intersection": any(r["self_intersects"] for r in sample_reports),
    }


@main.command("check")
@click.argument("bundle_file", type=str)
@click.option("--out", "out_path", type=str, default=None, help="write report JSON here")
def cmd_check(bundle_file, out_path) -> None:
    """Validate a flexion bundle and test every sample for self-intersection."""
    try:
        bundle = load_bundle(bundle_file)
    except KokonetError as exc:
        _fail(EXIT_IO, str(exc))
    report = check_bundle(bundle)
    text = json.dumps(report, indent=1)
    if out_path:
        try:
            with open(out_path, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            _fail(EXIT_IO, f"cannot write report: {exc}")
    click.echo(text)


@main.command("serve")
@click.option("--host", type=str, default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8077, show_default=True)
@click.option("--frontend", "frontend_dir", type=str, default=None,
              help="serve a built viewer from this directory at /")
def cmd_serve(host, port, frontend_dir) -> None:
    """Run the local JSON-over-HTTP service used by the viewer."""
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(frontend_dir=frontend_dir), host=host, port=port)


if __name__ == "__main__":
    main()
