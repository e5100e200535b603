"""End-to-end experiment orchestration and parameter sweeps.

A run executes campaign -> decorrelating transform -> quantization ->
reconciliation -> privacy amplification, computes the evaluation metrics,
and persists the public-channel artifacts (exactly what an eavesdropper may
see) plus private traces.  Every stage failure is tagged with its stage
name; an infeasible reconciliation is reported rather than fatal, so the
raw-key metrics of weak configurations remain observable.

``extraction="direct"`` bypasses the transform and quantizes each
subcarrier's time sequence with one bit per sample: the plain-SKG baseline
used for randomness and repeated-segment comparisons.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import reconcile as rc
from .errors import ParameterError, ReconciliationInfeasibleError, StageError
from .kl import BlockShape, KLTransform, TransformedMatrix, basis_leakage
from .metrics import KeyMetrics, bgr, bmr, nd_distribution
from .nist import nist_suite
from .probing import run_probing_campaign
from .quantizer import QuantizerConfig, apply_mask_intersection, quantize
from .traces import (
    ensure_dir,
    save_basis,
    save_discards,
    save_kept_indexes,
    save_nd_histogram,
    save_report,
    save_secrets,
    save_syndromes,
    save_trace,
)

logger = logging.getLogger("obskey")

NIST_SEGMENT_BITS = 1024


@dataclass
class RunReport:
    config: object
    key_metrics: KeyMetrics
    nist: object
    nd: object
    leakage: object
    reconciliation_ok: bool
    discarded_blocks: list
    final_key_alice: str
    final_key_bob: str
    keys_match: bool
    n_components: int
    bits_alice: np.ndarray
    bits_bob: np.ndarray
    campaign: object
    timings: dict


def _quantizer_config(config):
    return QuantizerConfig(
        first_component_bits=config.first_component_bits,
        other_component_bits=config.other_component_bits,
        window_len=config.window_len,
        guard_fraction=config.guard_fraction,
        part_mode=config.part_mode,
        adaptive_window=config.adaptive_window,
    )


def _noise_floor(csi, snr_db):
    if np.isinf(snr_db):
        return 0.0
    snr = 10.0 ** (snr_db / 10.0)
    return float(np.mean(np.abs(csi) ** 2)) / (1.0 + snr)


def extract_keys(campaign, config):
    """Transform + quantize both parties; returns (bits_a, bits_b, details).

    details: dict with basis (or None), eta1, raw keys, dropped positions.
    """
    qconf = _quantizer_config(config)
    if config.extraction == "kl":
        transformer = KLTransform(
            block_len_freq=config.block_len_freq or None,
            block_len_time=config.block_len_time,
            energy_fraction=config.energy_fraction,
            center=config.center,
        )
        transformer.fit(campaign.h_alice)
        basis = transformer.basis_
        t_alice = transformer.transform(campaign.h_alice)
        t_bob = transformer.transform(campaign.h_bob)
        noise_floor = _noise_floor(campaign.h_alice, config.snr_db)
        key_a, dropped_a = quantize(t_alice, basis, qconf, noise_floor)
        key_b, dropped_b = quantize(t_bob, basis, qconf, noise_floor)
        shape = BlockShape(config.effective_block_len_freq, config.block_len_time)
        k_used = (config.n_rounds // config.block_len_time) * config.block_len_time
        eta1 = basis_leakage(config.n_subcarriers, k_used, shape)
    else:
        # Plain per-subcarrier baseline: one bit per sample, no shared basis.
        shape = BlockShape(config.n_subcarriers, 1)
        levels = np.full(config.n_subcarriers, config.other_component_bits, dtype=int)
        t_alice = TransformedMatrix(data=campaign.h_alice, shape=shape)
        t_bob = TransformedMatrix(data=campaign.h_bob, shape=shape)
        basis = None
        key_a, dropped_a = quantize(t_alice, None, qconf, levels=levels)
        key_b, dropped_b = quantize(t_bob, None, qconf, levels=levels)
        eta1 = 0.0
    bits_a, bits_b = apply_mask_intersection(key_a, key_b)
    return bits_a, bits_b, {
        "basis": basis,
        "eta1": eta1,
        "key_alice": key_a,
        "key_bob": key_b,
        "dropped_alice": dropped_a,
        "dropped_bob": dropped_b,
    }


def run_experiment(config, outdir=None, run_nist=True):
    """Execute the full pipeline; optionally persist artifacts under outdir."""
    timings = {}

    def timed(stage, fn, *args, **kwargs):
        t0 = time.perf_counter()
        try:
            result = fn(*args, **kwargs)
        except (ParameterError, StageError):
            raise
        except Exception as exc:
            raise StageError(stage, str(exc)) from exc
        timings[stage] = time.perf_counter() - t0
        return result

    campaign = timed("campaign", run_probing_campaign, config.n_rounds, config, config.seed)
    bits_a, bits_b, details = timed("extract", extract_keys, campaign, config)
    if bits_a.size == 0:
        raise StageError("quantize", "no bits survived quantization")

    mismatch = bmr(bits_a, bits_b)
    metrics = KeyMetrics(
        bmr=mismatch,
        bgr=bgr(bits_b, config.n_rounds),
        total_bits=len(bits_b),
        n_rounds=config.n_rounds,
    )

    nist_report = None
    if run_nist and len(bits_b) >= 128:
        segment = bits_b[:NIST_SEGMENT_BITS] if len(bits_b) >= NIST_SEGMENT_BITS else bits_b
        import warnings as _warnings

        with _warnings.catch_warnings():
            _warnings.simplefilter("ignore")
            nist_report = timed("nist", nist_suite, segment)

    nd = None
    if len(bits_b) >= 2 * config.group_size:
        nd = timed("nd", nd_distribution, bits_b, config.group_size)

    reconciliation_ok = True
    discarded = []
    budget = None
    key_alice_hex = key_bob_hex = ""
    keys_match = False
    try:
        params = rc.select_code(mismatch)
        recon = timed("reconcile", rc.reconcile, bits_a, bits_b, params, details["eta1"])
        budget = recon.leakage
        discarded = recon.discarded_blocks
        key_a_final = timed(
            "amplify", rc.privacy_amplify, recon.bits_alice, budget.required_len, config.digest
        )
        key_b_final = rc.privacy_amplify(recon.bits_bob, budget.required_len, config.digest)
        key_alice_hex = key_a_final.hex()
        key_bob_hex = key_b_final.hex()
        keys_match = key_alice_hex == key_bob_hex
        recon_result = recon
    except (ReconciliationInfeasibleError, StageError) as exc:
        logger.warning("reconciliation unavailable: %s", exc)
        reconciliation_ok = False
        recon_result = None

    report = RunReport(
        config=config,
        key_metrics=metrics,
        nist=nist_report,
        nd=nd,
        leakage=budget,
        reconciliation_ok=reconciliation_ok,
        discarded_blocks=discarded,
        final_key_alice=key_alice_hex,
        final_key_bob=key_bob_hex,
        keys_match=keys_match,
        n_components=(details["basis"].n_components if details["basis"] else 0),
        bits_alice=bits_a,
        bits_bob=bits_b,
        campaign=campaign,
        timings=timings,
    )

    if outdir is not None:
        _write_artifacts(outdir, config, campaign, details, recon_result, report)
    for stage, elapsed in timings.items():
        logger.info("stage %-10s %.3f s", stage, elapsed)
    return report


def _write_artifacts(outdir, config, campaign, details, recon, report):
    out = ensure_dir(outdir)
    public = ensure_dir(out / "public")
    private = ensure_dir(out / "private")

    save_trace(public / "eve_csi.csv", campaign.h_eve_down, "E")
    if details["basis"] is not None:
        save_basis(public / "basis.csv", details["basis"])
    else:
        (public / "basis.csv").write_text("# {}\nrow,col,re,im\n", encoding="utf-8")
    dropped = np.concatenate([details["dropped_alice"], details["dropped_bob"]]) if len(
        details["dropped_alice"]
    ) or len(details["dropped_bob"]) else np.zeros((0, 3), dtype=int)
    save_kept_indexes(public / "kept_indexes.csv", dropped)
    if recon is not None:
        save_syndromes(public / "syndromes.bin", recon.syndromes, recon.params, recon.pad_len)
        save_discards(public / "discards.csv", recon.discarded_blocks)
    else:
        save_syndromes(
            public / "syndromes.bin",
            np.zeros((0, 0), dtype=np.uint8),
            rc.bch.SUPPORTED_CODES[0],
            0,
        )
        save_discards(public / "discards.csv", [])

    save_trace(private / "alice_csi.csv", campaign.h_alice, "A")
    save_trace(private / "bob_csi.csv", campaign.h_bob, "B")
    if config.dump_secrets:
        save_secrets(private / "secrets.csv", campaign.secrets)

    rows = report_rows(report)
    save_report(out / "report.csv", rows)
    if report.nd is not None:
        save_nd_histogram(out / "nd_histogram.csv", report.nd)


def report_rows(report):
    """Deterministic (metric, value, pass) rows; timings deliberately
    excluded so identical (config, seed) runs serialize identically."""
    m = report.key_metrics
    rows = [
        ("mode", report.config.mode, None),
        ("extraction", report.config.extraction, None),
        ("seed", report.config.seed, None),
        ("rounds", m.n_rounds, None),
        ("components", report.n_components, None),
        ("total_bits", m.total_bits, None),
        ("bmr", m.bmr, None),
        ("bgr", m.bgr, None),
    ]
    if report.leakage is not None:
        rows += [
            ("eta1", report.leakage.eta1, None),
            ("eta2", report.leakage.eta2, None),
            ("required_len", report.leakage.required_len, None),
        ]
    rows.append(("reconciliation_ok", report.reconciliation_ok, report.reconciliation_ok))
    rows.append(("discarded_blocks", len(report.discarded_blocks), None))
    if report.final_key_alice:
        rows += [
            ("final_key_alice", report.final_key_alice, None),
            ("final_key_bob", report.final_key_bob, None),
            ("keys_match", report.keys_match, report.keys_match),
        ]
    if report.nist is not None:
        for name, p in report.nist.p_values.items():
            rows.append((f"nist_{name}", p, p >= 0.01))
    if report.nd is not None:
        rows.append(("nd_pairs", report.nd.n_pairs, None))
        rows.append(("nd_tv_distance", report.nd.tv_distance, None))
    return rows


SWEEP_PARAMETERS = {
    "n_antennas": int,
    "filter_len": int,
    "energy_fraction": float,
    "first_component_bits": int,
    "window_len": int,
}


def _sweep_one(args):
    config, parameter, value, trial = args
    trial_config = config.with_overrides(**{parameter: value, "seed": config.seed + trial})
    report = run_experiment(trial_config, outdir=None, run_nist=False)
    return value, trial, report.key_metrics.bmr, report.key_metrics.bgr


def sweep(config, parameter, values, trials=1, jobs=1):
    """Mean/std of BMR and BGR per parameter value over seeded trials.

    Returns a list of dict rows (one per value).  Trials use seeds
    ``config.seed + trial`` and are independent, so execution order (or
    parallelism) does not affect results.
    """
    if parameter not in SWEEP_PARAMETERS:
        raise ParameterError(
            f"unknown sweep parameter {parameter!r}; supported: {sorted(SWEEP_PARAMETERS)}"
        )
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    tasks = [(config, parameter, value, trial) for value in values for trial in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_one, tasks))
    else:
        results = [_sweep_one(task) for task in tasks]

    rows = []
    for value in values:
        bmrs = [r[2] for r in results if r[0] == value]
        bgrs = [r[3] for r in results if r[0] == value]
        rows.append(
            {
                "parameter": parameter,
                "value": value,
                "bmr_mean": float(np.mean(bmrs)),
                "bmr_std": float(np.std(bmrs)),
                "bgr_mean": float(np.mean(bgrs)),
                "bgr_std": float(np.std(bgrs)),
                "trials": trials,
            }
        )
    return rows


def save_sweep(path, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("parameter,value,bmr_mean,bmr_std,bgr_mean,bgr_std,trials\n")
        for r in rows:
            fh.write(
                f"{r['parameter']},{r['value']},{r['bmr_mean']:.6g},{r['bmr_std']:.6g},"
                f"{r['bgr_mean']:.6g},{r['bgr_std']:.6g},{r['trials']}\n"
            )
