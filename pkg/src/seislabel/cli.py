"""Command-line front end: a thin client for the labeling service.

By default requests are served in-process through the ASGI app, so no
daemon is needed for batch work; pass --server to talk to a running
instance instead. Exit codes: 0 success, 1 runtime error, 2 usage or
configuration error.
"""

import argparse
import json
import sys

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="seislabel",
        description="Texture-attribute labeling of seismic section grids.",
    )
    parser.add_argument("--server", metavar="URL",
                        help="base URL of a running service "
                             "(default: run in-process)")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add_common(p, descriptor=True):
        p.add_argument("--config", required=True, help="pipeline config file")
        if descriptor:
            p.add_argument("--descriptor", help="override the configured descriptor")
            p.add_argument("--patch-size", type=int, help="override the patch size")
        p.add_argument("--workers", type=int,
                       help="worker processes (default: machine parallelism)")

    p = sub.add_parser("harvest", help="harvest training patches, write a manifest")
    add_common(p, descriptor=False)
    p.add_argument("--patch-size", type=int, help="override the patch size")
    p.add_argument("--out", help="manifest output path")

    p = sub.add_parser("train", help="harvest, featurize and train a model bundle")
    add_common(p)
    p.add_argument("--out", help="model bundle output path")

    p = sub.add_parser("label", help="label a section with a trained bundle")
    add_common(p)
    p.add_argument("--section", required=True, help="input section (.sgrid)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed-grid", help="also write the superpixel id map "
                                       "to this .sgrid path")

    p = sub.add_parser("evaluate", help="score predicted labels against ground truth")
    p.add_argument("--pred", required=True, help="predicted label grid (.sgrid)")
    p.add_argument("--truth", required=True, help="ground-truth label grid (.sgrid)")
    p.add_argument("--classes", type=int, help="class count (default: inferred)")
    p.add_argument("--out", help="also write the score report to this path")

    p = sub.add_parser("render", help="render a label grid to a PPM image")
    p.add_argument("--labels", required=True, help="label grid (.sgrid)")
    p.add_argument("--background", help="amplitude section to blend under the labels")
    p.add_argument("--classes", type=int, help="class count (default: inferred)")
    p.add_argument("--out", required=True, help="output PPM path")

    sub.add_parser("selftest", help="run the built-in invariant suites")
    return parser


def _client(server):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    # in-process transport through the same HTTP layer; unexpected service
    # errors surface as 500 responses exactly as they would remotely
    from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app, raise_server_exceptions=False)


def _post(client, path, payload):
    response = client.post(path, json=payload)
    body = response.json()
    if response.status_code >= 400:
        detail = body.get("detail", body) if isinstance(body, dict) else body
        print(f"error: {detail}", file=sys.stderr)
        return None, EXIT_USAGE if response.status_code in (400, 422) else EXIT_RUNTIME
    return body, EXIT_OK


def _run_harvest(client, args):
    body, code = _post(client, "/harvest", {
        "config": args.config,
        "patch_size": args.patch_size,
        "workers": args.workers,
        "out": args.out,
    })
    if body is None:
        return code
    print(f"manifest: {body['manifest_path']}")
    for name, count in body["counts"].items():
        print(f"  {name}: {count} patches")
    for name, (wanted, got) in body["shortfall"].items():
        print(f"warning: {name} has only {got} of {wanted} requested patches",
              file=sys.stderr)
    return EXIT_OK


def _run_train(client, args):
    body, code = _post(client, "/train", {
        "config": args.config,
        "descriptor": args.descriptor,
        "patch_size": args.patch_size,
        "workers": args.workers,
        "out": args.out,
    })
    if body is None:
        return code
    print(f"model: {body['model_path']} "
          f"(descriptor {body['descriptor']}, dim {body['feature_dim']})")
    for name, count in body["counts"].items():
        print(f"  {name}: {count} patches")
    for name, (wanted, got) in body["shortfall"].items():
        print(f"warning: {name} has only {got} of {wanted} requested patches",
              file=sys.stderr)
    return EXIT_OK


def _run_label(client, args):
    body, code = _post(client, "/label", {
        "config": args.config,
        "section": args.section,
        "descriptor": args.descriptor,
        "patch_size": args.patch_size,
        "workers": args.workers,
        "out": args.out,
        "seed_grid": args.seed_grid,
    })
    if body is None:
        return code
    print(f"labels: {body['labels_path']}")
    print(f"rendered: {body['ppm_path']}")
    if body["seed_grid_path"]:
        print(f"superpixels: {body['seed_grid_path']}")
    print(f"superpixel count: {body['superpixel_count']}")
    for name, count in body["class_pixel_counts"].items():
        print(f"  {name}: {count} px")
    return EXIT_OK


def _run_evaluate(client, args):
    body, code = _post(client, "/evaluate", {
        "pred": args.pred,
        "truth": args.truth,
        "n_classes": args.classes,
        "out": args.out,
    })
    if body is None:
        return code
    sys.stdout.write(body["report"])
    if body["report_path"]:
        print(f"report: {body['report_path']}")
    return EXIT_OK


def _run_render(client, args):
    body, code = _post(client, "/render", {
        "labels": args.labels,
        "background": args.background,
        "n_classes": args.classes,
        "out": args.out,
    })
    if body is None:
        return code
    print(f"rendered: {body['ppm_path']}")
    return EXIT_OK


def _run_selftest(client, _args):
    body, code = _post(client, "/selftest", {})
    if body is None:
        return code
    for check in body["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"{status} {check['name']}: {check['detail']}")
    return EXIT_OK if body["passed"] else EXIT_RUNTIME


_COMMANDS = {
    "harvest": _run_harvest,
    "train": _run_train,
    "label": _run_label,
    "evaluate": _run_evaluate,
    "render": _run_render,
    "selftest": _run_selftest,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    client = _client(args.server)
    try:
        return _COMMANDS[args.command](client, args)
    except json.JSONDecodeError:
        print("error: malformed response from service", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # connection failures and other runtime errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    finally:
        client.close()


if __name__ == "__main__":
    sys.exit(main())
