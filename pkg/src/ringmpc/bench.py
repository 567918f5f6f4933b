"""Benchmark harness: one session per row, model-derived cost columns.

The bits/rounds/DTT/CL columns are asserted quantities — fully determined
by the protocol, batch, and WAN model. The two wall-clock columns
(pre-computation and online compute time) are informational, hardware-bound
measurements; they stay empty unless measurement is requested so that CSV
and JSON output is byte-identical across runs.
"""
from __future__ import annotations

import re
import time

import numpy as np

from .dealer import Need
from .editdist import (
    edit_distance,
    edit_distance_manifest,
    share_strings,
)
from .engine import CostModel, Session
from .errors import CapabilityError, DomainError
from .gates import and_n, mult_n, or_n
from . import protocols as P
from .ring import BOOL, RingSpec

ROW_FIELDS = [
    "target",
    "name",
    "ring",
    "batch",
    "baseline",
    "precomp_ms",
    "online_compute_ms",
    "comm_bits",
    "dtt_ms",
    "rounds",
    "cl_ms",
    "online_total_ms",
]

_GATE_RE = re.compile(r"(\d+)-(and|or|mult)", re.IGNORECASE)


def _rand_inputs(sess: Session, rng, ring: RingSpec, batch: int, count: int,
                 high: int | None = None):
    limit = high if high is not None else ring.modulus
    return [
        sess.share_input(rng.integers(0, limit, size=batch, dtype=np.uint64), ring)
        for _ in range(count)
    ]


def _rand_bits(sess: Session, rng, batch: int, count: int):
    return _rand_inputs(sess, rng, BOOL, batch, count, high=2)


def _gate_setup(sess, rng, name, ring, batch):
    m = _GATE_RE.fullmatch(name)
    if not m:
        raise DomainError(f"unknown gate {name!r}; expected e.g. 2-AND, 3-MULT")
    fan = int(m.group(1))
    kind = m.group(2).lower()
    gate_ring = BOOL if kind in ("and", "or") else ring
    needs = [Need("bte", gate_ring.width_bits, batch, fan_in=fan)]
    fn = {"and": and_n, "or": or_n, "mult": mult_n}[kind]
    high = 2 if gate_ring.is_boolean else None

    def gen(store):
        inputs = _rand_inputs(sess, rng, gate_ring, batch, fan, high=high)
        return fn(inputs, *store.take_bte(fan, gate_ring, batch))

    return needs, gen


def _protocol_setup(sess, rng, name, ring, batch, baseline, fanin_cap):
    half = ring.modulus // 2  # comparison-safe plaintext domain

    maxn_match = re.fullmatch(r"max(\d+)", name)
    tlu_match = re.fullmatch(r"tlu(\d+)", name)

    if name in ("equality", "comparison", "max3", "min3", "argmax3", "argmin3"):
        if name == "equality":
            proto = P.baseline_equality if baseline else P.equality
            manifest = P.baseline_equality_manifest if baseline else P.equality_manifest
            xs = _rand_inputs(sess, rng, ring, batch, 2)
            return manifest(ring, batch), lambda store: proto(store, *xs)
        if name == "comparison":
            proto = P.baseline_comparison if baseline else P.comparison
            manifest = (P.baseline_comparison_manifest if baseline
                        else P.comparison_manifest)
            xs = _rand_inputs(sess, rng, ring, batch, 2, high=half)
            return manifest(ring, batch), lambda store: proto(store, *xs)
        if baseline and name != "max3":
            raise DomainError(f"no baseline variant of {name}")
        xs = _rand_inputs(sess, rng, ring, batch, 3, high=half)
        if name == "max3":
            proto = P.baseline_max3 if baseline else P.max3
            manifest = P.baseline_max3_manifest if baseline else P.max3_manifest
        else:
            proto = {"min3": P.min3, "argmax3": P.argmax3, "argmin3": P.argmin3}[name]
            manifest = {"min3": P.min3_manifest, "argmax3": P.argmax3_manifest,
                        "argmin3": P.argmin3_manifest}[name]
        return manifest(ring, batch), lambda store: proto(store, xs)

    if baseline:
        raise DomainError(f"no baseline variant of {name}")

    if name == "overflow":
        x = _rand_inputs(sess, rng, ring, batch, 1)[0]
        k = ring.width_bits
        return (P.overflow_manifest(ring, batch),
                lambda store: P.overflow_2r(store, x, k))
    if name == "overflow1r":
        if ring.width_bits not in P.OVF1R_SPLITS:
            raise CapabilityError(
                f"overflow1r unavailable at width {ring.width_bits}; the gate "
                "banks grow as 2**(low-half width)"
            )
        x = _rand_inputs(sess, rng, ring, batch, 1)[0]
        return (P.overflow_1r_manifest(ring, batch),
                lambda store: P.overflow_1r(store, x))
    if name == "msnzb":
        if ring.width_bits != 16:
            raise CapabilityError("msnzb supports width 16 only")
        vals = rng.integers(0, ring.modulus, size=batch, dtype=np.uint64)
        planes = [
            sess.share_input((vals >> np.uint64(j)) & np.uint64(1), BOOL)
            for j in range(16)
        ]
        return P.msnzb_manifest(batch), lambda store: P.msnzb(store, planes)
    if name == "b2a":
        (b,) = _rand_bits(sess, rng, batch, 1)
        return (P.b2a_manifest(ring, batch),
                lambda store: P.b2a(store, b, ring))
    if name == "bx2a":
        (b,) = _rand_bits(sess, rng, batch, 1)
        (x,) = _rand_inputs(sess, rng, ring, batch, 1)
        return P.bx2a_manifest(ring, batch), lambda store: P.bx2a(store, b, x)
    if name == "bc2a":
        b, c = _rand_bits(sess, rng, batch, 2)
        return (P.bc2a_manifest(ring, batch),
                lambda store: P.bc2a(store, b, c, ring))
    if name == "bcx2a":
        b, c = _rand_bits(sess, rng, batch, 2)
        (x,) = _rand_inputs(sess, rng, ring, batch, 1)
        return P.bcx2a_manifest(ring, batch), lambda store: P.bcx2a(store, b, c, x)
    if maxn_match:
        n_vals = int(maxn_match.group(1))
        xs = _rand_inputs(sess, rng, ring, batch, n_vals, high=half)
        return (P.maxn_manifest(ring, n_vals, batch, fanin_cap),
                lambda store: P.maxn(store, xs, fanin_cap))
    if tlu_match:
        n_keys = int(tlu_match.group(1))
        keys = rng.permutation(ring.modulus if ring.modulus < 2**20 else 2**20)[:n_keys]
        key_shares = [sess.share_input(np.full(batch, k, np.uint64), ring)
                      for k in keys]
        val_shares = _rand_inputs(sess, rng, ring, batch, n_keys)
        idx = sess.share_input(np.full(batch, keys[0], np.uint64), ring)
        table = P.LookupTable(key_shares, val_shares)
        return (P.tlu_manifest(ring, n_keys, batch),
                lambda store: P.tlu(store, table, idx))
    raise DomainError(f"unknown protocol {name!r}")


def run_bench(target: str, name: str = "", ring_width: int = 32, batch: int = 1,
              fanin_cap: int = 9, bandwidth_bits_per_ms: float = 80000.0,
              rtt_ms: float = 40.0, seed: int = 0, baseline: bool = False,
              length: int = 4, measure: bool = False) -> dict:
    """Execute one benchmark configuration and return its report row."""
    sess = Session(seed=seed, fanin_cap=fanin_cap)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xB]))
    ring = RingSpec(ring_width)

    if target == "gate":
        needs, gen_factory = _gate_setup(sess, rng, name, ring, batch)
    elif target == "protocol":
        needs, gen_factory = _protocol_setup(
            sess, rng, name, ring, batch, baseline, fanin_cap
        )
    elif target == "editdist":
        if baseline:
            raise DomainError("no baseline variant of editdist")
        codes = rng.integers(0, 4, size=(2, batch, length), dtype=np.uint64)
        s = share_strings(codes[0], sess.dealer)
        t = share_strings(codes[1], sess.dealer)
        needs = edit_distance_manifest(length, batch)
        gen_factory = lambda store: edit_distance(store, s, t)
        name = name or f"L{length}"
        ring_width = 16  # the app is fixed to Z_2^16
    else:
        raise DomainError(f"unknown target {target!r}")

    t0 = time.perf_counter()
    sess.provision(needs)
    precomp_ms = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    sess.run(gen_factory(sess.store))
    online_ms = (time.perf_counter() - t0) * 1000.0

    rep = sess.cost_report(CostModel(bandwidth_bits_per_ms, rtt_ms))
    return {
        "target": target,
        "name": name,
        "ring": ring_width,
        "batch": batch,
        "baseline": baseline,
        "precomp_ms": round(precomp_ms, 3) if measure else None,
        "online_compute_ms": round(online_ms, 3) if measure else None,
        "comm_bits": rep["bits_per_party"],
        "dtt_ms": rep["dtt_ms"],
        "rounds": rep["rounds"],
        "cl_ms": rep["cl_ms"],
        "online_total_ms": rep["online_total_ms"],
    }
