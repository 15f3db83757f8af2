"""Stimulus corpus assembly: graphs, per-target drawings, and the manifest.

Layout under the output root:

    <size>/<graph-id>/graph.json
    <size>/<graph-id>/<set-id>/<target>.json
    manifest.json

Every stochastic step derives its generator from a structural seed key
(root seed, size, graph index, set index, target, restart), so rebuilding
any subset reproduces identical bytes and completed drawings are skipped on
re-runs. Wall times are recorded in the manifest and flagged as the only
non-deterministic fields.
"""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import NonConvergenceError
from .graphs import Drawing, Graph, default_edge_probability, generate_graph
from .hillclimb import ClimbStats, HillClimbConfig, hill_climb
from .kernels import BACKEND_NAME

TARGETS_CENTI: tuple[int, ...] = tuple(range(40, 85, 5))
SET_IDS: tuple[str, ...] = ("s0", "s1", "s2")
GRAPHS_PER_SIZE = 5
DEFAULT_TOLERANCE = 0.01
DEFAULT_RESTARTS = 5


def target_label(centi: int) -> str:
    return f"{centi / 100:.2f}"


def graph_label(size: int, index: int) -> str:
    return f"n{size}-g{index}"


def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")
    os.replace(tmp, path)


def _climb_with_restarts(
    graph: Graph,
    seed_key: list[int],
    target_centi: int,
    tolerance: float,
    restart_budget: int,
) -> dict:
    start = time.perf_counter()
    last_error: NonConvergenceError | None = None
    for restart in range(restart_budget):
        stats = ClimbStats()
        config = HillClimbConfig(
            target_ksm=target_centi / 100,
            tolerance=tolerance,
            seed=np.random.SeedSequence(seed_key + [restart]),
        )
        try:
            drawing = hill_climb(graph, config, stats)
        except NonConvergenceError as err:
            last_error = err
            continue
        return {
            "pos": [[float(x), float(y)] for x, y in drawing.pos],
            "achieved_ksm": float(drawing.ksm),
            "iterations": stats.iterations,
            "accepted": stats.accepted,
            "restarts": restart,
            "wall_time_s": round(time.perf_counter() - start, 3),
        }
    assert last_error is not None
    raise last_error


def _climb_task(args) -> tuple[str, dict]:
    key, graph_json, seed_key, centi, tolerance, restarts = args
    graph = Graph(graph_json["n"], graph_json["edges"])
    return key, _climb_with_restarts(graph, seed_key, centi, tolerance, restarts)


class CorpusBuilder:
    def __init__(
        self,
        out_dir: str | Path,
        seed: int,
        *,
        edge_probability: float | None = None,
        tolerance: float = DEFAULT_TOLERANCE,
        restart_budget: int = DEFAULT_RESTARTS,
        targets_centi: Sequence[int] = TARGETS_CENTI,
        jobs: int = 1,
        log=None,
    ):
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.root = Path(out_dir)
        self.seed = int(seed)
        self.edge_probability = edge_probability
        self.tolerance = tolerance
        self.restart_budget = restart_budget
        self.targets_centi = tuple(int(t) for t in targets_centi)
        self.jobs = max(1, int(jobs))
        self.log = log or (lambda _msg: None)

    def build(self, sizes: Iterable[int]) -> dict:
        sizes = sorted(int(s) for s in set(sizes))
        manifest = self._load_manifest()
        manifest["v"] = 1
        manifest["seed"] = self.seed
        manifest["backend"] = BACKEND_NAME
        manifest["tolerance"] = self.tolerance
        manifest["targets"] = [target_label(t) for t in self.targets_centi]
        manifest["sets"] = list(SET_IDS)
        manifest["non_deterministic_keys"] = ["wall_time_s"]
        manifest.setdefault("edge_probability", {})
        manifest.setdefault("graphs", {})
        manifest.setdefault("drawings", {})

        graphs = self._ensure_graphs(sizes, manifest)
        pending = self._pending_drawings(sizes, manifest, graphs)
        if pending:
            self.log(f"{len(pending)} drawings to generate")
            self._run_climbs(pending, manifest, graphs)
        self._save_manifest(manifest)
        return manifest

    # -- internals ---------------------------------------------------------

    def _manifest_path(self) -> Path:
        return self.root / "manifest.json"

    def _load_manifest(self) -> dict:
        path = self._manifest_path()
        if path.exists():
            loaded = json.loads(path.read_text())
            if loaded.get("seed") not in (None, self.seed):
                raise ValueError(
                    f"corpus at {self.root} was built with seed {loaded.get('seed')}, "
                    f"not {self.seed}"
                )
            return loaded
        return {}

    def _save_manifest(self, manifest: dict) -> None:
        path = self._manifest_path()
        text = json.dumps(manifest, sort_keys=True, indent=1) + "\n"
        if path.exists() and path.read_text() == text:
            return
        self.root.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(text)
        os.replace(tmp, path)

    def _ensure_graphs(self, sizes: list[int], manifest: dict) -> dict[str, Graph]:
        graphs: dict[str, Graph] = {}
        for size in sizes:
            p = (
                self.edge_probability
                if self.edge_probability is not None
                else default_edge_probability(size)
            )
            manifest["edge_probability"][str(size)] = p
            for gi in range(GRAPHS_PER_SIZE):
                gid = graph_label(size, gi)
                file = self.root / str(size) / gid / "graph.json"
                seed_key = [self.seed, size, gi]
                if gid in manifest["graphs"] and file.exists():
                    graphs[gid] = Graph.from_json(json.loads(file.read_text()))
                    continue
                graph = generate_graph(size, p, np.random.SeedSequence(seed_key))
                _write_json(file, graph.to_json())
                manifest["graphs"][gid] = {
                    "size": size,
                    "file": str(file.relative_to(self.root)),
                    "n": graph.n,
                    "m": graph.m,
                    "seed_key": seed_key,
                }
                graphs[gid] = graph
                self.log(f"graph {gid}: n={graph.n} m={graph.m}")
        return graphs

    def _drawing_key(self, gid: str, set_id: str, centi: int) -> str:
        return f"{gid}/{set_id}/{target_label(centi)}"

    def _drawing_file(self, size: int, gid: str, set_id: str, centi: int) -> Path:
        return self.root / str(size) / gid / set_id / f"{target_label(centi)}.json"

    def _pending_drawings(
        self, sizes: list[int], manifest: dict, graphs: dict[str, Graph]
    ) -> list[tuple]:
        pending = []
        for size in sizes:
            for gi in range(GRAPHS_PER_SIZE):
                gid = graph_label(size, gi)
                for si, set_id in enumerate(SET_IDS):
                    for centi in self.targets_centi:
                        key = self._drawing_key(gid, set_id, centi)
                        file = self._drawing_file(size, gid, set_id, centi)
                        if key in manifest["drawings"] and self._complete(
                            file, gid, centi
                        ):
                            continue
                        seed_key = [self.seed, size, gi, si, centi]
                        pending.append(
                            (
                                key,
                                graphs[gid].to_json(),
                                seed_key,
                                centi,
                                self.tolerance,
                                self.restart_budget,
                            )
                        )
        return pending

    def _complete(self, file: Path, gid: str, centi: int) -> bool:
        if not file.exists():
            return False
        try:
            obj = json.loads(file.read_text())
        except json.JSONDecodeError:
            return False
        if obj.get("graph_id") != gid or obj.get("ksm") is None:
            return False
        return abs(obj["ksm"] - centi / 100) <= self.tolerance

    def _run_climbs(
        self, pending: list[tuple], manifest: dict, graphs: dict[str, Graph]
    ) -> None:
        if self.jobs > 1:
            with ProcessPoolExecutor(max_workers=self.jobs) as pool:
                results = pool.map(_climb_task, pending, chunksize=1)
                for key, result in results:
                    self._record(key, result, manifest)
        else:
            for task in pending:
                key, result = _climb_task(task)
                self._record(key, result, manifest)

    def _record(self, key: str, result: dict, manifest: dict) -> None:
        gid, set_id, label = key.split("/")
        size = manifest["graphs"][gid]["size"]
        centi = round(float(label) * 100)
        file = self._drawing_file(size, gid, set_id, centi)
        drawing_json = {
            "graph_id": gid,
            "pos": result["pos"],
            "ksm": result["achieved_ksm"],
        }
        _write_json(file, drawing_json)
        si = SET_IDS.index(set_id)
        manifest["drawings"][key] = {
            "file": str(file.relative_to(self.root)),
            "achieved_ksm": result["achieved_ksm"],
            "iterations": result["iterations"],
            "accepted": result["accepted"],
            "restarts": result["restarts"],
            "seed_key": [self.seed, size, gid_index(gid), si, centi],
            "wall_time_s": result["wall_time_s"],
        }
        self.log(
            f"{key}: ksm={result['achieved_ksm']:.4f} "
            f"iters={result['iterations']} restarts={result['restarts']}"
        )


def gid_index(gid: str) -> int:
    return int(gid.rsplit("-g", 1)[1])


def gid_size(gid: str) -> int:
    return int(gid.split("-", 1)[0][1:])


def build_corpus(
    sizes: Iterable[int],
    seed: int,
    out_dir: str | Path,
    **kwargs,
) -> dict:
    return CorpusBuilder(out_dir, seed, **kwargs).build(sizes)


class CorpusView:
    """Read access to a corpus directory, with lazy caching."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        manifest_path = self.root / "manifest.json"
        if not manifest_path.exists():
            raise FileNotFoundError(f"no manifest.json under {self.root}")
        self.manifest = json.loads(manifest_path.read_text())
        self._graphs: dict[str, Graph] = {}
        self._drawings: dict[str, Drawing] = {}

    @property
    def sizes(self) -> list[int]:
        return sorted({info["size"] for info in self.manifest["graphs"].values()})

    @property
    def set_ids(self) -> list[str]:
        return list(self.manifest.get("sets", SET_IDS))

    @property
    def targets_centi(self) -> list[int]:
        return [round(float(t) * 100) for t in self.manifest["targets"]]

    def graph_ids(self, size: int) -> list[str]:
        return sorted(
            gid
            for gid, info in self.manifest["graphs"].items()
            if info["size"] == size
        )

    def graph(self, gid: str) -> Graph:
        if gid not in self._graphs:
            file = self.root / self.manifest["graphs"][gid]["file"]
            self._graphs[gid] = Graph.from_json(json.loads(file.read_text()))
        return self._graphs[gid]

    def drawing_key(self, gid: str, set_id: str, centi: int) -> str:
        return f"{gid}/{set_id}/{target_label(centi)}"

    def drawing(self, gid: str, set_id: str, centi: int) -> Drawing:
        key = self.drawing_key(gid, set_id, centi)
        if key not in self._drawings:
            info = self.manifest["drawings"].get(key)
            if info is None:
                raise KeyError(f"corpus has no drawing {key}")
            obj = json.loads((self.root / info["file"]).read_text())
            self._drawings[key] = Drawing.from_json(
                obj, self.graph(gid), graph_id=gid
            )
        return self._drawings[key]

    def recorded_ksm(self, gid: str, set_id: str, centi: int) -> float:
        key = self.drawing_key(gid, set_id, centi)
        return self.manifest["drawings"][key]["achieved_ksm"]

    def all_drawing_keys(self) -> list[str]:
        return sorted(self.manifest["drawings"])

    def has_size(self, size: int) -> bool:
        return bool(self.graph_ids(size)) and all(
            self.drawing_key(gid, set_id, centi) in self.manifest["drawings"]
            for gid in self.graph_ids(size)
            for set_id in self.set_ids
            for centi in self.targets_centi
        )
