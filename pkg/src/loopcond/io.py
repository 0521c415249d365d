"""JSON interchange for algebras, relations and permutation groups."""
import json
from pathlib import Path
from typing import Union

from .core import FiniteAlgebra, Operation, Relation
from .errors import LoopCondError

PathLike = Union[str, Path]


def _load(src):
    """A path, inline JSON text, or an already parsed document."""
    if isinstance(src, str) and src.lstrip().startswith(("{", "[")):
        return json.loads(src)
    if isinstance(src, (str, Path)):
        return json.loads(Path(src).read_text(encoding="utf-8"))
    return src


def algebra_from_json(src) -> FiniteAlgebra:
    data = _load(src)
    try:
        ops = tuple(Operation(o["name"], int(o["arity"]), o["table"]) for o in data["operations"])
        return FiniteAlgebra(int(data["size"]), ops)
    except (KeyError, TypeError) as e:
        raise LoopCondError(f"malformed algebra document: {e}") from None


def algebra_to_json(A: FiniteAlgebra) -> dict:
    return {
        "size": A.size,
        "operations": [
            {"name": o.name, "arity": o.arity, "table": [int(v) for v in o.table]}
            for o in A.operations
        ],
    }


def relation_from_json(src) -> Relation:
    data = _load(src)
    try:
        return Relation(int(data["domain"]), int(data["arity"]), [tuple(t) for t in data["tuples"]])
    except (KeyError, TypeError) as e:
        raise LoopCondError(f"malformed relation document: {e}") from None


def relation_to_json(R: Relation, **header) -> dict:
    doc = {"domain": R.domain, "arity": R.arity, "tuples": [list(t) for t in R.tuples]}
    doc.update(header)
    return doc


def group_from_json(src):
    from .grouporbit import PermGroup

    data = _load(src)
    try:
        return PermGroup(int(data["degree"]), [tuple(g) for g in data["generators"]])
    except (KeyError, TypeError) as e:
        raise LoopCondError(f"malformed group document: {e}") from None


def group_to_json(G) -> dict:
    return {"degree": G.degree, "generators": [list(g) for g in G.generators]}


def write_json(path: PathLike, doc) -> None:
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
