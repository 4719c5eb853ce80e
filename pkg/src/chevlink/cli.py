"""Command-line client for the chevlink service.

Every subcommand posts a request to the service and prints the JSON report.
By default the service app runs in-process (no separate server needed);
pass --server to talk to a remote instance, or run ``chevlink serve``.

Exit codes: 0 when all requested verdicts pass, 1 when a verdict fails,
2 on request errors.
"""

from __future__ import annotations

import sys

import click
import httpx

from .report import stable_json, __version__


def _request(server: str | None, path: str, payload: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.post(path, json=payload)

    import asyncio

    from .service.app import app

    async def run():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
                transport=transport, base_url="http://chevlink.local",
                timeout=None) as client:
            return await client.post(path, json=payload)

    return asyncio.run(run())


def _post(ctx, path: str, payload: dict) -> None:
    resp = _request(ctx.obj.get("server"), path, payload)
    try:
        body = resp.json()
    except ValueError:
        click.echo(resp.text, err=True)
        sys.exit(2)
    if resp.status_code != 200:
        click.echo(stable_json(body), err=True)
        sys.exit(2)
    click.echo(stable_json(body["report"]))
    passed = body.get("passed")
    sys.exit(0 if passed in (True, None) else 1)


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="Remote service URL (default: run the app in-process).")
@click.version_option(__version__)
@click.pass_context
def main(ctx, server):
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


@main.command()
@click.option("--config", type=click.Choice(["a3", "b3-small", "b3-large"]),
              required=True)
@click.option("--q", type=int, required=True)
@click.option("--out-tri", required=True, help="Triangle-edge SMS output path.")
@click.option("--out-edge", default=None, help="Edge-vertex SMS output path.")
@click.option("--allow-long", is_flag=True,
              help="Permit long-running targets (prints estimates first).")
@click.option("--realization", type=click.Choice(["auto", "matrix"]),
              default="auto",
              help="'matrix' forces the 7x7 realization even over F_2.")
@click.pass_context
def build(ctx, config, q, out_tri, out_edge, allow_long, realization):
    """Build a link complex and write its incidence matrices as SMS."""
    _post(ctx, "/build", {"config": config, "q": q, "out_tri": out_tri,
                          "out_edge": out_edge, "allow_long": allow_long,
                          "realization": realization})


@main.command()
@click.option("--p", type=int, default=2, show_default=True)
@click.option("--in", "path", required=True, help="SMS file to rank.")
@click.option("--dense-threshold", type=float, default=0.03, show_default=True)
@click.option("--mem-budget", "mem_budget_mb", type=int, default=None,
              help="Dense-phase memory budget in MiB.")
@click.pass_context
def rank(ctx, p, path, dense_threshold, mem_budget_mb):
    """Exact rank of an SMS matrix mod p, with elimination statistics."""
    _post(ctx, "/rank", {"path": path, "p": p,
                         "dense_threshold": dense_threshold,
                         "mem_budget_mb": mem_budget_mb})


@main.command("check-homology")
@click.option("--config", type=click.Choice(["a3", "b3-small", "b3-large"]),
              required=True)
@click.option("--q", type=int, required=True)
@click.option("--p", type=int, default=2, show_default=True)
@click.option("--allow-long", is_flag=True)
@click.pass_context
def check_homology(ctx, config, q, p, allow_long):
    """Build + connectivity + rank + 1-homology vanishing verdict."""
    _post(ctx, "/check-homology", {"config": config, "q": q, "p": p,
                                   "allow_long": allow_long})


@main.command()
@click.option("--suite",
              type=click.Choice(["steinberg", "lift", "relations",
                                 "filling-a3", "normal-form"]),
              required=True)
@click.option("--system", type=click.Choice(["a3", "b3"]), default="b3",
              show_default=True, help="Root system (steinberg suite).")
@click.option("--config", type=click.Choice(["a3", "b3-small", "b3-large"]),
              default="b3-large", show_default=True)
@click.option("--q", type=int, default=5, show_default=True)
@click.option("--p", type=int, default=5, show_default=True,
              help="Base prime (lift suite).")
@click.option("--k", type=int, default=1, show_default=True,
              help="Extension degree (lift suite).")
@click.option("--specs", type=int, default=10, show_default=True)
@click.option("--pairs", type=int, default=500, show_default=True)
@click.option("--samples", type=int, default=10_000, show_default=True)
@click.option("--seed", type=int, default=20240501, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Thread parallelism for relation sweeps.")
@click.option("--allow-long", is_flag=True)
@click.pass_context
def verify(ctx, suite, system, config, q, p, k, specs, pairs, samples, seed,
           jobs, allow_long):
    """Run one of the verification suites."""
    if suite == "steinberg":
        _post(ctx, "/verify/steinberg", {"system": system, "q": q})
    elif suite == "lift":
        _post(ctx, "/verify/lift", {"config": config, "p": p, "k": k,
                                    "specs": specs, "pairs": pairs,
                                    "seed": seed})
    elif suite == "relations":
        _post(ctx, "/verify/relations", {"config": config, "q": q,
                                         "samples": samples, "seed": seed,
                                         "jobs": jobs})
    elif suite == "filling-a3":
        _post(ctx, "/verify/filling-a3", {"q": q})
    else:
        _post(ctx, "/verify/normal-form", {"config": config, "q": q,
                                           "allow_long": allow_long})


@main.command("cone-radius")
@click.option("--config", type=click.Choice(["a3", "b3-small", "b3-large"]),
              required=True)
@click.option("--q", type=int, required=True)
@click.option("--apex", type=int, default=0, show_default=True)
@click.option("--allow-long", is_flag=True)
@click.pass_context
def cone_radius(ctx, config, q, apex, allow_long):
    """BFS cone-radius bound and the implied coboundary-expansion bound."""
    _post(ctx, "/cone-radius", {"config": config, "q": q, "apex": apex,
                                "allow_long": allow_long})


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8421, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
