"""Distributed residue addition: independent per-modulus jobs plus CRT.

A sum is split into one modulo-adder job per modulus.  Jobs share nothing
and carry their own seeds, so results are bit-identical for any worker
count or scheduling order.  The classical side plans residues, runs the
jobs, and recombines the modal outcomes through the Chinese Remainder
Theorem.
"""
from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .adders import AdderFamily, AdderInstance, adder_instance, build_adder
from .noise import NoiseModel, derive_seed, output_probability, run_shots
from .resources import ResourceReport, resource_report
from .rns import (
    ResidueVector,
    RnsSet,
    crt_reconstruct,
    rns_efficiency,
    rns_range,
)
from .select import DepthSource, SelectorConfig, select_rns


class RangeOverflowError(ValueError):
    """The requested sum does not fit the residue system's range."""


@dataclass(frozen=True)
class ResidueJob:
    """Everything one worker (or remote QPU) needs to run its modulus."""

    job_id: int
    modulus: int
    instance: AdderInstance
    a_residue: int
    b_residue: int
    shots: int
    seed: int

    @property
    def expected_bits(self) -> int:
        return self.instance.expected_output_bits(self.a_residue, self.b_residue)


@dataclass(frozen=True)
class JobResult:
    job_id: int
    modulus: int
    histogram: Counter[int] | None
    top_bits: int | None
    top_value: int | None
    top_probability: float
    tie: bool
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass(frozen=True)
class DistributedSum:
    """Aggregate of all residue jobs for one addition."""

    rns: RnsSet
    results: tuple[JobResult, ...]
    reconstructed: int
    set_output_probability: float
    end_to_end_probability: float
    any_tie: bool


def plan_jobs(a: int, b: int, rns: RnsSet, shots: int, base_seed: int,
              instances: dict[int, AdderInstance] | None = None) -> list[ResidueJob]:
    """One job per modulus; residues of a and b, per-job derived seeds."""
    total_range = rns_range(rns)
    if not (0 <= a < total_range and 0 <= b < total_range):
        raise ValueError(f"operands must lie in [0, {total_range})")
    if a + b >= total_range:
        raise RangeOverflowError(
            f"a+b = {a + b} >= range {total_range}; the residue system "
            "wraps silently, so oversized sums are rejected up front"
        )
    jobs = []
    for index, (modulus, (family, n)) in enumerate(zip(rns.moduli, rns.families)):
        if instances and modulus in instances:
            instance = instances[modulus]
        else:
            instance = adder_instance(build_adder(family, n))
        jobs.append(ResidueJob(
            job_id=index,
            modulus=modulus,
            instance=instance,
            a_residue=a % modulus,
            b_residue=b % modulus,
            shots=shots,
            seed=derive_seed(base_seed, index, modulus),
        ))
    return jobs


def _run_job(job: ResidueJob, noise: NoiseModel) -> JobResult:
    instance = job.instance
    circuit = instance.circuit
    inputs = {}
    a_bits = instance.encode_operand(job.a_residue)
    b_bits = instance.encode_operand(job.b_residue)
    if instance.family is AdderFamily.MOD_POW2_PLUS1:
        inputs["ALOW"] = a_bits % 2**instance.n
        inputs["AMSB"] = a_bits >> instance.n
        inputs["B"] = b_bits
    else:
        inputs["A"] = a_bits
        inputs["B"] = b_bits
    histogram = run_shots(circuit, inputs, job.shots, noise, job.seed,
                          instance.output_wires)
    top_count = max(histogram.values())
    modal = sorted(bits for bits, count in histogram.items() if count == top_count)
    # Ties break toward the smaller decoded value and are flagged.
    decoded = sorted((instance.decode_output(bits), bits) for bits in modal
                     if _decodable(instance, bits))
    if decoded:
        top_value, top_bits = decoded[0]
    else:
        # Modal outcome is not a legal codeword (possible under heavy
        # noise for the diminished-1 family); keep bits, mark no value.
        top_bits, top_value = modal[0], None
    return JobResult(
        job_id=job.job_id,
        modulus=job.modulus,
        histogram=histogram,
        top_bits=top_bits,
        top_value=top_value,
        top_probability=top_count / job.shots,
        tie=len(modal) > 1,
    )


def _decodable(instance: AdderInstance, bits: int) -> bool:
    try:
        instance.decode_output(bits)
    except ValueError:
        return False
    return True


def execute_jobs(jobs: list[ResidueJob], workers: int,
                 noise: NoiseModel) -> list[JobResult]:
    """Run jobs concurrently; failures stay isolated to their own job."""
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")

    def safe(job: ResidueJob) -> JobResult:
        try:
            return _run_job(job, noise)
        except Exception as exc:  # noqa: BLE001 - per-job isolation
            return JobResult(job_id=job.job_id, modulus=job.modulus,
                             histogram=None, top_bits=None, top_value=None,
                             top_probability=0.0, tie=False, error=str(exc))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(safe, jobs))
    return sorted(results, key=lambda r: r.job_id)


def aggregate(results: list[JobResult], rns: RnsSet) -> DistributedSum:
    """CRT-combine per-job modal outcomes into the distributed sum."""
    by_modulus = {r.modulus: r for r in results if not r.failed}
    missing = [m for m in rns.moduli if m not in by_modulus]
    if missing:
        failed = {r.modulus: r.error for r in results if r.failed}
        raise ValueError(f"missing results for moduli {missing}"
                         + (f" (failed: {failed})" if failed else ""))
    residues = []
    for modulus in rns.moduli:
        result = by_modulus[modulus]
        if result.top_value is None:
            raise ValueError(
                f"modulus {modulus}: modal outcome {result.top_bits:#x} is "
                "not a decodable codeword"
            )
        residues.append(result.top_value)
    ordered = tuple(by_modulus[m] for m in rns.moduli)
    probs = [r.top_probability for r in ordered]
    end_to_end = 1.0
    for p in probs:
        end_to_end *= p
    return DistributedSum(
        rns=rns,
        results=ordered,
        reconstructed=crt_reconstruct(ResidueVector(rns, tuple(residues))),
        set_output_probability=min(probs),
        end_to_end_probability=end_to_end,
        any_tie=any(r.tie for r in ordered),
    )


def distributed_add(a: int, b: int, rns: RnsSet, noise: NoiseModel,
                    shots: int = 100, base_seed: int = 0,
                    workers: int = 1) -> DistributedSum:
    jobs = plan_jobs(a, b, rns, shots, base_seed)
    return aggregate(execute_jobs(jobs, workers, noise), rns)


# --- size-by-size comparison against the monolithic adder ------------------

MOD_SHOTS = 100    # published protocol: one hundred shots for modulo adders
FULL_SHOTS = 200   # and two hundred for the full adders
DEVICE_BUDGET = 20


@dataclass(frozen=True)
class ComparisonRow:
    """One adder size: monolithic baseline vs distributed residue set."""

    size: int
    mono_report: ResourceReport
    mono_probability: float | None  # None when over the device budget
    rns: RnsSet
    efficiency: Fraction
    max_qubits: int
    max_toffoli_depth: int
    max_cnot_depth: int
    set_probability: float
    gain_percent: float | None

    @property
    def mono_qubits(self) -> int:
        return self.mono_report.qubit_count


def gain_report(sizes: list[int], efficiency: float, noise: NoiseModel,
                seed: int = 0, shots_mod: int = MOD_SHOTS,
                shots_full: int = FULL_SHOTS, budget: int = DEVICE_BUDGET,
                depth_source: DepthSource = DepthSource.PAPER_TABLE,
                sampling: int | str = "auto") -> list[ComparisonRow]:
    """Compare monolithic addition to the selected residue sets per size.

    A size-s adder produces an s-bit sum from (s-1)-bit operands; its
    residue counterpart is selected for K = 2^s.  The monolithic
    probability column goes None above the qubit budget.
    """
    if any(size < 6 for size in sizes):
        raise ValueError("sizes below 6 leave K under the selector minimum")
    rows = []
    mod_probs: dict[int, float] = {}
    for size in sizes:
        cfg = SelectorConfig(k=2**size, efficiency=efficiency,
                             depth_source=depth_source)
        rns = select_rns(cfg)
        instances = {m: adder_instance(build_adder(fam, n))
                     for m, (fam, n) in zip(rns.moduli, rns.families)}
        set_prob = 1.0
        reports = {}
        for modulus, instance in instances.items():
            reports[modulus] = resource_report(instance.circuit)
            if modulus not in mod_probs:
                mod_probs[modulus] = output_probability(
                    instance, noise, shots=shots_mod,
                    seed=derive_seed(seed, "mod", modulus), sampling=sampling,
                ).mean
            set_prob = min(set_prob, mod_probs[modulus])
        mono = adder_instance(build_adder(AdderFamily.FULL, size - 1))
        mono_report = resource_report(mono.circuit)
        if mono_report.qubit_count <= budget:
            mono_prob = output_probability(
                mono, noise, shots=shots_full,
                seed=derive_seed(seed, "full", size), sampling=sampling,
            ).mean
            gain = 100.0 * (set_prob / mono_prob - 1.0)
        else:
            mono_prob = None
            gain = None
        rows.append(ComparisonRow(
            size=size,
            mono_report=mono_report,
            mono_probability=mono_prob,
            rns=rns,
            efficiency=rns_efficiency(rns, 2**size),
            max_qubits=max(r.qubit_count for r in reports.values()),
            max_toffoli_depth=max(r.toffoli_depth for r in reports.values()),
            max_cnot_depth=max(r.cnot_depth for r in reports.values()),
            set_probability=set_prob,
            gain_percent=gain,
        ))
    return rows
