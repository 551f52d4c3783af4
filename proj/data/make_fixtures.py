#!/usr/bin/env python3
"""Regenerate the ck-metric CSV fixtures in this directory.

Each project has two versions with pinned module and defective counts.
Metrics are noisy views of two latent factors: z1 (size/complexity) feeds
the wmc/rfc/loc family with strong loadings, z2 (coupling) feeds the
cbo/ca/ce family with individually weak loadings plus a mild z1
cross-loading.

Defects have two causes: a size-driven share (top of z1 plus noise) and a
coupling-driven share (top of z2 plus noise). The cause mix shifts between
versions: the earlier release is size-heavy, the later one coupling-heavy,
as when a release absorbs a wave of integration work. A learner therefore
picks up the size signal quickly and only acquires the coupling signal
from a steady supply of correctly labeled coupling defects in the newer
version. That heterogeneity is what makes corrupted feedback labels
genuinely harmful: once coupling defects are mislabeled as clean, the
coupling direction never enters the model.

Knobs per version: cause2_share plus s1/s2 (labeling noise per cause;
higher = weaker ceiling). Crisp prior-version labels push the ROC-derived
decision threshold up, which keeps online predictions conservative on the
next version.

Deterministic: fixed seeds, no dependence on dict order or hashing.
"""

import os

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))

METRICS = [
    "wmc", "dit", "noc", "cbo", "rfc", "lcom", "ca", "ce", "npm", "lcom3",
    "loc", "dam", "moa", "mfa", "cam", "ic", "cbm", "amc", "max_cc", "avg_cc",
]

PROJECTS = [
    {
        "name": "ant",
        "package": "org.apache.tools.ant",
        "seed": 160401,
        "size_skew": -0.25,
        "versions": [("1.6", 351, 92, 0.20, 0.50, 0.50), ("1.7", 745, 166, 0.75, 0.50, 0.50)],
    },
    {
        "name": "synapse",
        "package": "org.apache.synapse",
        "seed": 220455,
        "size_skew": -0.45,
        "z2_scale": 0.85,
        "versions": [("1.1", 222, 60, 0.20, 0.35, 0.45), ("1.2", 256, 86, 0.50, 0.75, 0.85)],
    },
]


def gen_metrics(z1, z2, project, rng):
    n = z1.shape[0]
    e = lambda: rng.normal(0.0, 1.0, n)  # noqa: E731
    w = project.get("z2_scale", 1.0)

    cols = {}
    # size/complexity family (z1): strong, clean loadings
    cols["wmc"] = np.round(np.exp(1.8 + 0.60 * z1 + 0.35 * e())).clip(0, 300)
    cols["rfc"] = np.round(np.exp(3.0 + 0.65 * z1 + 0.30 * e())).clip(0, 600)
    cols["lcom"] = np.round(np.exp(2.2 + 0.90 * z1 + 0.80 * e())).clip(0, 8000)
    cols["npm"] = np.round(np.exp(1.5 + 0.55 * z1 + 0.40 * e())).clip(0, 200)
    cols["loc"] = np.round(np.exp(4.2 + 0.75 * z1 + 0.35 * e())).clip(1, 20000)
    cols["amc"] = np.round(np.exp(2.6 + 0.30 * z1 + 0.50 * e()).clip(0, 900), 2)
    cols["max_cc"] = np.round(np.exp(0.9 + 0.55 * z1 + 0.40 * e())).clip(1, 100)
    cols["avg_cc"] = np.round((1.0 + 0.45 * z1 + 0.30 * e()).clip(0.2, 12.0), 4)
    # coupling family (z2): individually weak, collectively informative,
    # partially confounded with size
    cols["cbo"] = np.round(np.exp(1.9 + w * 0.28 * z2 + 0.20 * z1 + 0.50 * e())).clip(0, 200)
    cols["ca"] = rng.poisson(np.exp(0.8 + w * 0.26 * z2 + 0.18 * z1))
    cols["ce"] = rng.poisson(np.exp(1.0 + w * 0.28 * z2 + 0.20 * z1))
    cols["moa"] = rng.poisson(np.exp(0.3 + w * 0.24 * z2 + 0.15 * z1))
    cols["ic"] = rng.poisson(np.exp(-0.8 + w * 0.30 * z2 + 0.12 * z1))
    cols["cbm"] = rng.poisson(np.exp(-0.5 + w * 0.32 * z2 + 0.15 * z1))
    # weak or no signal
    cols["dit"] = np.round(2.2 + 0.15 * z1 + 0.9 * e()).clip(1, 8)
    cols["noc"] = rng.poisson(0.7, n)
    cols["lcom3"] = np.round((1.0 - 0.10 * z1 + 0.30 * e()).clip(0.0, 2.0), 4)
    cols["dam"] = np.round(rng.beta(2.0, 2.0, n), 4)
    cols["mfa"] = np.round(rng.beta(2.0, 3.0, n), 4)
    cols["cam"] = np.round((0.50 - 0.08 * z2 + 0.12 * e()).clip(0.02, 1.0), 4)
    return cols


def pick_defective(z1, z2, k, cause2_share, s1, s2, project, rng):
    n = z1.shape[0]
    k2 = int(round(k * cause2_share))
    k1 = k - k2

    score1 = z1 + s1 * rng.normal(0.0, 1.0, n)
    # coupling defects skew toward smaller modules (adapters, glue code)
    score2 = z2 + project["size_skew"] * z1 + s2 * rng.normal(0.0, 1.0, n)

    defective = np.zeros(n, dtype=bool)
    defective[np.argsort(-score1)[:k1]] = True
    for i in np.argsort(-score2):
        if k2 == 0:
            break
        if not defective[i]:
            defective[i] = True
            k2 -= 1
    return defective


def fmt(v):
    f = float(v)
    if f == int(f):
        return str(int(f))
    return repr(round(f, 6))


def write_version(project, version, n, k, cause2_share, s1, s2, rng):
    z1 = rng.normal(0.0, 1.0, n)
    z2 = rng.normal(0.0, 1.0, n)
    cols = gen_metrics(z1, z2, project, rng)
    defective = pick_defective(z1, z2, k, cause2_share, s1, s2, project, rng)
    extra = rng.poisson(0.8, n)
    bugs = np.where(defective, 1 + extra, 0)

    for m in METRICS:
        assert np.unique(cols[m]).size > 1, f"{project['name']} {version}: constant {m}"
        assert np.all(np.isfinite(cols[m].astype(float)))
    assert int(defective.sum()) == k

    path = os.path.join(HERE, f"{project['name']}-{version}.csv")
    with open(path, "w", newline="\n") as f:
        f.write("name,version,name.1," + ",".join(METRICS) + ",bug\n")
        for i in range(n):
            ident = f"{project['package']}.Class{i:04d}"
            row = [project["name"], version, ident]
            row += [fmt(cols[m][i]) for m in METRICS]
            row.append(str(int(bugs[i])))
            f.write(",".join(row) + "\n")
    print(f"{path}: {n} modules, {k} defective ({100.0 * k / n:.1f}%)")


def main():
    for project in PROJECTS:
        rng = np.random.default_rng(project["seed"])
        for version, n, k, cause2_share, s1, s2 in project["versions"]:
            write_version(project, version, n, k, cause2_share, s1, s2, rng)


if __name__ == "__main__":
    main()
