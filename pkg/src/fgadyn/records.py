"""Line-delimited JSON records and the run manifest."""

import hashlib
import json
from datetime import datetime, timezone

from . import __version__


def dumps(record):
    return json.dumps(record, sort_keys=True, separators=(",", ":"), allow_nan=False)


def make_manifest(command, config, inputs, seed):
    """Manifest record; its id hashes everything except the timestamp."""
    body = {
        "kind": "manifest",
        "command": command,
        "config": config,
        "inputs": inputs,
        "seed": seed,
        "version": __version__,
    }
    body["manifest_id"] = hashlib.sha256(dumps(body).encode()).hexdigest()[:16]
    body["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return body


def class_info(h):
    if h is None:
        return None
    if len(h) <= 200:
        return {"literal": str(h), "length": len(h), "digest": h.digest()}
    return {"literal": None, "length": len(h), "digest": h.digest()}


def automorphism_info(phi):
    return {
        "label": phi.label,
        "rank": phi.rank,
        "images": [str(w) for w in phi.images],
        "inverse_images": [str(w) for w in phi.inverse_images],
    }


def frequency_pairs(fv, digits=12):
    return [[lit, val] for lit, val in fv.to_pairs(digits)]


def _num(x):
    return None if x is None else float(x)


def scan_info(v):
    return {
        "tag": v.tag,
        "max_len": v.max_len,
        "iterations": v.iterations,
        "length_cap": v.length_cap,
        "periodic_class": class_info(v.periodic_class),
        "period": v.period,
        "periodic_classes": [[str(h), p] for h, p in v.periodic_classes],
        "single_primitive": v.single_primitive,
        "classes_checked": v.classes_checked,
        "truncated": v.truncated,
        "checked_bound": v.checked_bound,
    }


def seed_run_info(run):
    return {
        "seed": class_info(run.seed),
        "lengths": run.lengths,
        "iterations": run.iterations,
        "capped": run.capped,
        "residual": _num(run.residual),
        "stability_gap": _num(run.stability_gap),
        "frequencies": frequency_pairs(run.frequencies),
    }


def simplex_info(est):
    return {
        "window": est.window,
        "residual": _num(est.residual),
        "vertices": [frequency_pairs(v) for v in est.vertices],
        "pairwise": [[float(x) for x in row] for row in est.pairwise],
    }


_CLASS = {
    "anyOf": [
        {"type": "null"},
        {
            "type": "object",
            "required": ["literal", "length", "digest"],
            "properties": {
                "literal": {"type": ["string", "null"]},
                "length": {"type": "integer", "minimum": 1},
                "digest": {"type": "string"},
            },
        },
    ]
}

_REQUIRED = {
    "manifest": ["command", "config", "inputs", "seed", "version", "timestamp"],
    "check": ["automorphism", "valid", "abelianization", "in_ia_mod3"],
    "check_error": ["error", "message"],
    "filtration": ["label", "strata", "extensions", "invariant"],
    "orbit": ["seed", "verdict", "steps"],
    "scan": ["automorphism", "verdict"],
    "ns_seed": ["direction", "run"],
    "ns_summary": ["forward", "backward", "scan"],
    "growth": ["seed", "lengths", "ratio"],
    "gns_seed": ["seed", "verdict", "forward_fraction", "backward_fraction"],
    "gns_summary": ["marked_generator", "fixed_current_exact", "counts"],
    "automorphism": ["automorphism"],
    "subgroup": ["tag", "bounds"],
    "error": ["error", "message"],
}

RECORD_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["kind", "manifest_id"],
    "properties": {
        "kind": {"enum": sorted(_REQUIRED)},
        "manifest_id": {"type": "string", "pattern": "^[0-9a-f]{16}$"},
        "seed": {},
        "verdict": {},
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": k}}}, "then": {"required": req}}
        for k, req in sorted(_REQUIRED.items())
    ]
    + [
        {
            "if": {"properties": {"kind": {"enum": ["orbit", "growth", "gns_seed"]}}},
            "then": {"properties": {"seed": _CLASS}},
        }
    ],
}
