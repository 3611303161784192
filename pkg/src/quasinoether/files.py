"""JSON problem, family, generator and corpus-entry documents."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import expr as ex
from .family import Family, FamilyError, Generator
from .homogeneity import Weights
from .model import Problem, ProblemError
from .search import Ansatz


class FileFormatError(ValueError):
    """Malformed document; the message names the file and, when known, the line."""


def _line_of(text: str, needle) -> int | None:
    if not isinstance(needle, str) or not text:
        return None
    idx = text.find(json.dumps(needle))
    return text.count("\n", 0, idx) + 1 if idx >= 0 else None


class _Doc:
    def __init__(self, data: dict, source: str, text: str = ""):
        self.data = data
        self.source = source
        self.text = text

    def fail(self, msg: str, value=None):
        line = _line_of(self.text, value)
        where = f"{self.source}:{line}" if line else self.source
        raise FileFormatError(f"{where}: {msg}")

    def get(self, key, default=...):
        if key in self.data:
            return self.data[key]
        if default is ...:
            self.fail(f"missing field {key!r}")
        return default

    def expr(self, label: str, value) -> ex.Expr:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            value = str(value)
        if not isinstance(value, str):
            self.fail(f"field {label} must be an expression string")
        try:
            return ex.parse(value)
        except ex.ExprError as err:
            self.fail(f"field {label}: {err}", value)

    def exprs(self, key: str, length: int | None = None) -> tuple:
        items = self.get(key)
        if not isinstance(items, list):
            self.fail(f"field {key!r} must be a list of expression strings")
        if length is not None and len(items) != length:
            self.fail(f"field {key!r} has {len(items)} entries, expected {length}")
        return tuple(self.expr(f"{key}[{i + 1}]", v) for i, v in enumerate(items))


def read_document(path) -> _Doc:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise FileFormatError(f"{path}: {err.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise FileFormatError(f"{path}:{err.lineno}: {err.msg}") from None
    if not isinstance(data, dict):
        raise FileFormatError(f"{path}: top level must be an object")
    return _Doc(data, str(path), text)


def problem_from_doc(doc: _Doc) -> Problem:
    n, m = doc.get("n"), doc.get("m")
    if not isinstance(n, int) or not isinstance(m, int):
        doc.fail("n and m must be integers")
    horizon = doc.get("horizon", [0, 1])
    try:
        return Problem(
            n=n,
            m=m,
            lagrangian=doc.expr("lagrangian", doc.get("lagrangian")),
            dynamics=doc.exprs("dynamics", n),
            name=str(doc.get("name", "problem")),
            horizon=tuple(horizon),
        )
    except ProblemError as err:
        doc.fail(str(err))


def family_from_doc(doc: _Doc) -> Family:
    try:
        return Family(
            r=int(doc.get("r", 1)),
            T=doc.expr("T", doc.get("T")),
            X=doc.exprs("X"),
            U=doc.exprs("U"),
            F=doc.expr("F", doc.get("F", "0")),
        )
    except FamilyError as err:
        doc.fail(str(err))


def generator_from_doc(doc: _Doc) -> Generator:
    comps = doc.data.get("components")
    parts = comps if comps is not None else [doc.data]
    taus, xis, ups, fs = [], [], [], []
    for k, part in enumerate(parts):
        sub = _Doc(part, doc.source, doc.text)
        taus.append(sub.expr("tau", sub.get("tau", "0")))
        xis.append(sub.exprs("xi"))
        ups.append(sub.exprs("upsilon"))
        fs.append(sub.expr("f", sub.get("f", "0")))
    try:
        return Generator(tuple(taus), tuple(xis), tuple(ups), tuple(fs))
    except FamilyError as err:
        doc.fail(str(err))


def problem_to_dict(p: Problem) -> dict:
    return {
        "name": p.name,
        "n": p.n,
        "m": p.m,
        "lagrangian": str(p.lagrangian),
        "dynamics": [str(e) for e in p.dynamics],
        "horizon": list(p.horizon),
    }


def family_to_dict(f: Family) -> dict:
    return {"r": f.r, "T": str(f.T), "X": [str(e) for e in f.X], "U": [str(e) for e in f.U], "F": str(f.F)}


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    problem: Problem
    family: Family | None
    generator: Generator | None
    expected_integral: ex.Expr
    expected_weights: Weights | None = None
    numeric: bool = False
    search: Ansatz | None = None
    gauge_variant: dict | None = None
    title: str = ""


def entry_from_doc(doc: _Doc) -> CorpusEntry:
    sub = lambda key: _Doc(doc.get(key), doc.source, doc.text)  # noqa: E731
    problem = problem_from_doc(sub("problem"))
    family = family_from_doc(sub("family")) if "family" in doc.data else None
    generator = generator_from_doc(sub("generator")) if "generator" in doc.data else None
    weights = None
    if "expected_weights" in doc.data:
        w = sub("expected_weights")
        weights = Weights(
            ex.parse(str(w.get("alpha"))).constant_value(),
            tuple(ex.parse(str(b)).constant_value() for b in w.get("beta")),
            tuple(ex.parse(str(g)).constant_value() for g in w.get("gamma")),
        )
    search = Ansatz(**doc.data["search"]) if "search" in doc.data else None
    return CorpusEntry(
        name=str(doc.get("name", problem.name)),
        problem=problem,
        family=family,
        generator=generator,
        expected_integral=doc.expr("expected_integral", doc.get("expected_integral")),
        expected_weights=weights,
        numeric=bool(doc.get("numeric", False)),
        search=search,
        gauge_variant=doc.data.get("gauge_variant"),
        title=str(doc.get("title", "")),
    )


def corpus_dir():
    return resources.files("quasinoether") / "corpus"


def corpus_names(directory=None) -> list:
    base = Path(directory) if directory is not None else corpus_dir()
    if not base.is_dir():
        raise FileFormatError(f"{base}: corpus directory not found")
    return sorted(p.name[:-5] for p in base.iterdir() if p.name.endswith(".json"))


def load_entry(name: str, directory=None) -> CorpusEntry:
    base = Path(directory) if directory is not None else corpus_dir()
    path = base / f"{name}.json"
    if not path.is_file():
        # short names such as ex6_2 resolve when exactly one entry extends them
        matches = [n for n in corpus_names(base) if n.startswith(name + "_")]
        if len(matches) != 1:
            raise FileFormatError(f"no corpus entry named {name!r}")
        path = base / f"{matches[0]}.json"
    return entry_from_doc(read_document(path))


def resolve(arg: str, directory=None):
    """A file path becomes a document; a bare corpus name becomes an entry."""
    path = Path(arg)
    if path.is_file():
        doc = read_document(path)
        if "problem" in doc.data and isinstance(doc.data["problem"], dict):
            return entry_from_doc(doc)
        return doc
    if path.suffix == "" and "/" not in arg:
        return load_entry(arg, directory)
    raise FileFormatError(f"{arg}: no such file or corpus entry")


def load_problem(arg: str) -> Problem:
    obj = resolve(arg)
    return obj.problem if isinstance(obj, CorpusEntry) else problem_from_doc(obj)


def load_transform(arg: str):
    """Family or Generator, told apart by their fields."""
    obj = resolve(arg)
    if isinstance(obj, CorpusEntry):
        return obj.family if obj.family is not None else obj.generator
    if "T" in obj.data or "X" in obj.data:
        return family_from_doc(obj)
    if "xi" in obj.data or "components" in obj.data:
        return generator_from_doc(obj)
    obj.fail("document is neither a family (T, X, U, F) nor a generator (tau, xi, upsilon, f)")
