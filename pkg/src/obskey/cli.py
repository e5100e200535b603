"""Command-line interface.

Subcommands:
  probe     run a probing campaign and write CSI traces (``--seed`` required)
  extract   run the key-extraction pipeline end to end, writing artifacts
  attack    evaluate the adversary scenarios against a configuration
  sweep     parameter sweep with per-value BMR/BGR statistics
  nist      run the randomness battery on a saved bit file

Exit codes: 0 success, 2 parameter error, 3 stage failure.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import attacks
from .config import load_config
from .errors import ObskeyError, ParameterError, StageError
from .metrics import nd_distribution
from .nist import nist_suite
from .pipeline import run_experiment, save_sweep, sweep
from .probing import run_probing_campaign
from .traces import ensure_dir, load_trace, save_nd_histogram, save_report, save_secrets, save_trace


def _add_common(parser):
    parser.add_argument("--config", type=Path, default=None, help="key=value config file")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a configuration key (repeatable)",
    )
    parser.add_argument(
        "--preset", choices=["desk"], default=None, help="apply a bundled size preset"
    )
    parser.add_argument("--out", type=Path, default=Path("out"), help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(prog="obskey", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_probe = sub.add_parser("probe", help="run a probing campaign, write traces")
    _add_common(p_probe)
    p_probe.add_argument("--seed", type=int, required=True)
    p_probe.add_argument(
        "--dump-secrets",
        action="store_true",
        help="also write the private obfuscation ground truth",
    )

    p_extract = sub.add_parser("extract", help="run the key-extraction pipeline")
    _add_common(p_extract)
    p_extract.add_argument(
        "--traces",
        type=Path,
        default=None,
        help="ingest an existing trace file (parties A and B) instead of simulating",
    )

    p_attack = sub.add_parser("attack", help="run adversary evaluations")
    _add_common(p_attack)
    p_attack.add_argument(
        "--scenario",
        choices=["predictable_channel", "position_replay", "effective_bruteforce", "order_speculation", "all"],
        default="all",
    )

    p_sweep = sub.add_parser("sweep", help="sweep a parameter")
    _add_common(p_sweep)
    p_sweep.add_argument("--parameter", required=True)
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--trials", type=int, default=1)
    p_sweep.add_argument("--jobs", type=int, default=1)

    p_nist = sub.add_parser("nist", help="randomness battery on a bit file")
    p_nist.add_argument("bits_file", type=Path, help="text file of 0/1 characters")
    p_nist.add_argument("--out", type=Path, default=None, help="write a report CSV here")
    return parser


def _config_from(args):
    return load_config(path=args.config, overrides=args.overrides, preset=args.preset)


def cmd_probe(args):
    config = _config_from(args).with_overrides(seed=args.seed, dump_secrets=args.dump_secrets)
    campaign = run_probing_campaign(config.n_rounds, config, config.seed)
    out = ensure_dir(args.out)
    save_trace(out / "alice_csi.csv", campaign.h_alice, "A")
    save_trace(out / "bob_csi.csv", campaign.h_bob, "B")
    save_trace(out / "eve_csi.csv", campaign.h_eve_down, "E")
    save_trace(out / "eve_uplink_csi.csv", campaign.h_eve_up, "E")
    if config.dump_secrets:
        save_secrets(out / "secrets.csv", campaign.secrets)
    print(f"wrote traces for {config.n_rounds} rounds to {out}")
    return 0


def cmd_extract(args):
    config = _config_from(args)
    if args.traces is not None:
        parties = load_trace(args.traces)
        if not {"A", "B"} <= set(parties):
            raise ParameterError("trace file must contain parties A and B")
        h_alice, h_bob = parties["A"], parties["B"]
        config = config.with_overrides(
            n_subcarriers=h_alice.shape[0], n_rounds=h_alice.shape[1]
        )

        from .pipeline import extract_keys
        from .probing import CampaignResult

        campaign = CampaignResult(
            h_alice=h_alice,
            h_bob=h_bob,
            h_eve_down=parties.get("E", np.zeros_like(h_alice)),
            h_eve_up=np.zeros_like(h_alice),
            secrets=[],
            antenna_truth=np.zeros(h_alice.shape[1], dtype=int),
        )
        bits_a, bits_b, _ = extract_keys(campaign, config)
        from .metrics import bgr, bmr

        print(f"ingested traces: {len(bits_b)} bits, bmr={bmr(bits_a, bits_b):.4f}, "
              f"bgr={bgr(bits_b, config.n_rounds):.2f}")
        return 0
    report = run_experiment(config, outdir=args.out)
    m = report.key_metrics
    print(
        f"bmr={m.bmr:.4f} bgr={m.bgr:.2f} bits={m.total_bits} "
        f"reconciled={report.reconciliation_ok} keys_match={report.keys_match}"
    )
    return 0


def cmd_attack(args):
    config = _config_from(args)
    out = ensure_dir(args.out)
    rows = []
    if args.scenario in ("predictable_channel", "all"):
        result = attacks.predictable_channel_scenario(config, config.door_period)
        for mode, score in sorted(result.scores.items()):
            rows.append((f"door_score_{mode}", score, None))
    if args.scenario in ("position_replay", "all"):
        result = attacks.replay_scenario(config, config.replay_offset)
        rows.append(("replay_rho_be_median", result.median, None))
    if args.scenario in ("effective_bruteforce", "order_speculation", "all"):
        campaign = run_probing_campaign(config.n_rounds, config, config.seed)
        if args.scenario in ("effective_bruteforce", "all"):
            from .pipeline import extract_keys

            bits_a, bits_b, _ = extract_keys(campaign, config)
            gain = attacks.effective_bruteforce_gain(bits_b, config.group_size)
            rows.append(("bruteforce_d95", gain.d95, None))
            rows.append(("bruteforce_search_space_log2", gain.search_space_log2, None))
            save_nd_histogram(out / "nd_histogram.csv", gain.distribution)
        if args.scenario in ("order_speculation", "all"):
            spec_result = attacks.speculate_antenna_order(
                campaign.h_eve_down,
                config.n_antennas,
                campaign.antenna_truth,
                feature=config.kmeans_feature,
                restarts=config.cluster_restarts,
                seed=config.seed,
            )
            rows.append(("speculation_accuracy", spec_result.overall_accuracy, None))
            with open(out / "confusion.csv", "w", encoding="utf-8") as fh:
                fh.write(",".join(f"cluster_{i + 1}" for i in range(config.n_antennas)) + "\n")
                for row in spec_result.confusion:
                    fh.write(",".join(str(v) for v in row) + "\n")
    save_report(out / "attack_report.csv", rows)
    for metric, value, _ in rows:
        print(f"{metric}: {value}")
    return 0


def cmd_sweep(args):
    config = _config_from(args)
    raw_values = args.values.split(",")
    if args.parameter == "energy_fraction":
        values = [float(v) for v in raw_values]
    else:
        values = [int(v) for v in raw_values]
    rows = sweep(config, args.parameter, values, trials=args.trials, jobs=args.jobs)
    out = ensure_dir(args.out)
    path = out / f"sweep_{args.parameter}.csv"
    save_sweep(path, rows)
    for r in rows:
        print(
            f"{args.parameter}={r['value']}: bmr={r['bmr_mean']:.4f}+-{r['bmr_std']:.4f} "
            f"bgr={r['bgr_mean']:.2f}+-{r['bgr_std']:.2f}"
        )
    print(f"wrote {path}")
    return 0


def cmd_nist(args):
    text = args.bits_file.read_text(encoding="utf-8")
    bits = np.array([int(c) for c in text if c in "01"], dtype=np.uint8)
    report = nist_suite(bits)
    rows = [(f"nist_{name}", p, p >= 0.01) for name, p in report.p_values.items()]
    if len(bits) >= 256:
        nd = nd_distribution(bits, group_size=min(128, len(bits) // 2))
        rows.append(("nd_tv_distance", nd.tv_distance, None))
    if args.out is not None:
        ensure_dir(args.out)
        save_report(Path(args.out) / "nist_report.csv", rows)
    for metric, value, ok in rows:
        flag = "" if ok is None else (" PASS" if ok else " FAIL")
        print(f"{metric}: {value:.4g}{flag}")
    return 0 if all(ok for _, _, ok in rows if ok is not None) else 0


COMMANDS = {
    "probe": cmd_probe,
    "extract": cmd_extract,
    "attack": cmd_attack,
    "sweep": cmd_sweep,
    "nist": cmd_nist,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s %(levelname)s %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"stage failure: {exc}", file=sys.stderr)
        return 3
    except ObskeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
