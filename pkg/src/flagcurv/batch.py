"""Seeded sweeps over random flags and the closed-form cross-check."""
from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .curvature import Convention, CurvatureContext
from .errors import DegenerateMetricError, HypothesisError, PoleError
from .flag import (FORMS, discrepancy_ledger, flag_curvature_closed, random_flag, with_sample)
from .natred import natred_check_riemannian
from .space import SpaceDescriptor, fmt

log = logging.getLogger(__name__)


def thread_count(requested=None) -> int:
    if requested is None:
        try:
            requested = int(os.environ.get("FLAGCURV_THREADS", "0"))
        except ValueError:
            requested = 0
    if requested <= 0:
        requested = os.cpu_count() or 1
    return max(1, int(requested))


def _ordered_map(fn, items, threads):
    if threads == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def sweep(desc: SpaceDescriptor, samples: int, seed: int, convention=Convention.STANDARD,
          family=None, X=None, theorem="theorem", form="literal", threads=None):
    """Closed form vs oracle on ``samples`` random flags.

    Sample i uses ``default_rng([seed, i])``, so the output does not depend
    on the thread count.  Samples whose evaluation hits a pole give a report
    of ``None`` in their slot.
    """
    metric = desc.metric(family, X)
    ctx = CurvatureContext(desc.algebra, desc.structure, Convention(convention))

    def one(i):
        rng = np.random.default_rng([int(seed), i])
        flag = random_flag(desc.algebra, desc.structure, rng, metric)
        try:
            rep = flag_curvature_closed(metric, ctx, flag, theorem, form)
        except (PoleError, DegenerateMetricError) as exc:
            log.warning("sample %d skipped: %s", i, exc)
            return flag, None
        return flag, with_sample(rep, i, seed)

    return _ordered_map(one, range(int(samples)), thread_count(threads))


def sweep_csv(desc: SpaceDescriptor, results) -> str:
    labels = desc.basis
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sample_index", *(f"Y_{l}" for l in labels), *(f"U_{l}" for l in labels),
                "s_value", "K_closed", "K_oracle", "rel_diff", "F_positive", "shen_ok", "norm_bound_ok"])
    for i, (flag, rep) in enumerate(results):
        row = [i, *(fmt(x) for x in flag.Y), *(fmt(x) for x in flag.U)]
        if rep is None:
            row += ["nan"] * 4 + [""] * 3
        else:
            s = desc.structure.inner(np.array(rep.inputs["X"]), flag.Y)
            st = rep.domain_stamp
            row += [fmt(s), fmt(rep.closed_form), fmt(rep.oracle), fmt(rep.rel_diff),
                    int(st["F_positive"]), int(st["shen_ok"]), int(st["norm_bound_ok"])]
        w.writerow(row)
    return buf.getvalue()


def applicable_theorems(desc: SpaceDescriptor) -> list:
    out = ["theorem"]
    if natred_check_riemannian(desc.algebra, desc.structure).passed:
        out.append("natred")
        psi = desc.structure.psi
        if not desc.h_indices and np.allclose(psi, np.eye(desc.dimension)):
            out.append("corollary")
    return out


def xcheck(desc: SpaceDescriptor, samples: int, seed: int, tol: float = 1e-6,
           convention=Convention.STANDARD, family=None, X=None, theorems=None, forms=FORMS,
           threads=None):
    """Every applicable closed form against the oracle; returns the ledger."""
    reports = []
    for theorem in theorems or applicable_theorems(desc):
        for form in forms:
            try:
                results = sweep(desc, samples, seed, convention, family, X, theorem, form, threads)
            except HypothesisError as exc:
                log.warning("%s skipped: %s", theorem, exc)
                continue
            for _, rep in results:
                if rep is not None:
                    rep.tolerance = tol
                    reports.append(rep)
    if not reports:
        raise ValueError("no closed form could be evaluated on this space")
    return discrepancy_ledger(reports, tol)
