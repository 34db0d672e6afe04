"""JSON instance documents: validation, resolution to objects, and canonical emission."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import jsonschema

from .algebra import (DEFAULT_MAX_DIM, AlgebraMorphism, AlgebraPresentation, LocalAlgebra,
                      build_algebra, check_local_morphism)
from .errors import IndepForgeError, ParseError, ValidationError
from .field import Field
from .module import (FpModule, algebra_as_module, direct_sum, free_module, module_from_cokernel,
                     quotient_ideal_module, restrict_scalars)
from .poly import parse_poly

SCHEMA_VERSION = "indepforge/1"


def load_schema() -> dict:
    return json.loads(resources.files("indepforge").joinpath("data/schema.json").read_text())


def _pointer(path) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


@dataclass
class Instance:
    field: Field
    rings: dict[str, LocalAlgebra] = field(default_factory=dict)
    morphisms: dict[str, AlgebraMorphism] = field(default_factory=dict)
    modules: dict[str, FpModule] = field(default_factory=dict)
    command: dict | None = None
    # source records, kept so the instance can be emitted again
    ring_specs: dict[str, dict] = field(default_factory=dict)
    morphism_specs: dict[str, dict] = field(default_factory=dict)
    module_specs: dict[str, dict] = field(default_factory=dict)
    module_rings: dict[str, str] = field(default_factory=dict)

    def ring_of(self, module_name: str) -> str:
        return self.module_rings[module_name]

    def element(self, ring: str, text, pointer: str = ""):
        A = self.rings[ring]
        return _poly(A, text, pointer)


def _poly(A: LocalAlgebra, text, pointer: str):
    try:
        return A.element(text)
    except ParseError as exc:
        raise ParseError(exc.detail.split(" at column")[0], exc.text, exc.position, pointer) from None
    except ValidationError as exc:
        raise ValidationError(exc.detail, pointer) from None


def _at(exc: ValidationError, pointer: str) -> ValidationError:
    """Attach a pointer to a validation error, keeping its class."""
    exc.pointer = pointer
    exc.args = (f"{pointer}: {exc.detail}",)
    return exc


def validate_document(doc) -> None:
    """JSON-schema validation; the first error is reported with its pointer."""
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ValidationError(err.message, _pointer(err.absolute_path) or "/")


def parse_instance(doc, max_dim: int = DEFAULT_MAX_DIM) -> Instance:
    if isinstance(doc, (str, bytes)):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", position=exc.pos) from None
    validate_document(doc)
    F = Field.parse(doc["field"])
    inst = Instance(F)
    for name, spec in doc.get("rings", {}).items():
        ptr = f"/rings/{name}"
        try:
            pres = AlgebraPresentation.from_strings(F, spec["vars"], [], spec["truncation"],
                                                    spec.get("order", "degrevlex"))
        except ValidationError as exc:
            raise _at(exc, ptr) from None
        rels = []
        for i, r in enumerate(spec.get("relations", [])):
            try:
                rels.append(parse_poly(r, F, pres.var_names))
            except ParseError as exc:
                raise ParseError(exc.detail.split(" at column")[0], exc.text, exc.position,
                                 f"{ptr}/relations/{i}") from None
        pres.relations = rels
        try:
            inst.rings[name] = build_algebra(pres, max_dim=max_dim, name=name)
        except ValidationError as exc:
            raise _at(exc, ptr) from None
        inst.ring_specs[name] = spec
    for name, spec in doc.get("morphisms", {}).items():
        ptr = f"/morphisms/{name}"
        src, tgt = _ring(inst, spec["source"], ptr + "/source"), _ring(inst, spec["target"], ptr + "/target")
        if len(spec["images"]) != src.nvars:
            raise ValidationError(f"expected {src.nvars} images, got {len(spec['images'])}", ptr + "/images")
        imgs = [_poly(tgt, s, f"{ptr}/images/{i}") for i, s in enumerate(spec["images"])]
        try:
            inst.morphisms[name] = check_local_morphism(AlgebraMorphism(src, tgt, imgs, name=name))
        except ValidationError as exc:
            raise _at(exc, ptr) from None
        inst.morphism_specs[name] = spec
    for name, spec in doc.get("modules", {}).items():
        inst.modules[name] = _module(inst, name, spec, f"/modules/{name}")
        inst.module_specs[name] = spec
    inst.command = doc.get("command")
    return inst


def _ring(inst: Instance, name: str, ptr: str) -> LocalAlgebra:
    if name not in inst.rings:
        raise ValidationError(f"unknown ring {name!r}", ptr)
    return inst.rings[name]


def _module(inst: Instance, name: str, spec: dict, ptr: str) -> FpModule:
    A = _ring(inst, spec["ring"], ptr + "/ring")
    kind = spec["kind"]
    if kind == "free":
        M = free_module(A, spec.get("rank", 1), name=name)
    elif kind == "algebra":
        M = algebra_as_module(A, name=name)
    elif kind == "quotient-ideal":
        gens = [_poly(A, g, f"{ptr}/ideal/{i}") for i, g in enumerate(spec.get("ideal", []))]
        M = quotient_ideal_module(A, A.ideal(gens) if gens else A.zero_ideal(), name=name)
    elif kind == "cokernel":
        r = spec["rank"]
        cols = []
        for j, col in enumerate(spec.get("columns", [])):
            if len(col) != r:
                raise ValidationError(f"column has {len(col)} entries, rank is {r}", f"{ptr}/columns/{j}")
            cols.append([_poly(A, e, f"{ptr}/columns/{j}/{k}") for k, e in enumerate(col)])
        M = module_from_cokernel(A, r, cols, name=name)
    elif kind == "sum":
        parts = []
        for i, s in enumerate(spec.get("summands", [])):
            if s not in inst.modules:
                raise ValidationError(f"unknown module {s!r}", f"{ptr}/summands/{i}")
            if inst.modules[s].A is not A:
                raise ValidationError(f"summand {s!r} is over another ring", f"{ptr}/summands/{i}")
            parts.append(inst.modules[s])
        M = direct_sum(parts, name=name)
    else:  # pragma: no cover - the schema rejects other kinds
        raise ValidationError(f"unknown module kind {kind!r}", ptr + "/kind")
    ring_name = spec["ring"]
    if "restrict" in spec:
        mname = spec["restrict"]
        if mname not in inst.morphisms:
            raise ValidationError(f"unknown morphism {mname!r}", ptr + "/restrict")
        phi = inst.morphisms[mname]
        if phi.target is not A:
            raise ValidationError("restriction morphism must end in the module's ring", ptr + "/restrict")
        M = restrict_scalars(phi, M, name=name)
        ring_name = inst.morphism_specs[mname]["source"]
    inst.module_rings[name] = ring_name
    return M


def emit_instance(inst: Instance) -> dict:
    """Canonical document: relations and images re-rendered from the built objects."""
    doc: dict = {"schema": SCHEMA_VERSION, "field": repr(inst.field)}
    rings = {}
    for name, A in inst.rings.items():
        pres = A.presentation
        rings[name] = {"vars": list(A.var_names), "relations": pres.relation_strings(),
                       "truncation": pres.truncation, "order": pres.order.name}
    doc["rings"] = rings
    doc["morphisms"] = {name: {"source": inst.morphism_specs[name]["source"],
                               "target": inst.morphism_specs[name]["target"],
                               "images": [phi.target.format(img) for img in phi.images]}
                        for name, phi in inst.morphisms.items()}
    mods = {}
    for name, spec in inst.module_specs.items():
        A = inst.rings[spec["ring"]]
        out = {"ring": spec["ring"], "kind": spec["kind"]}
        if spec["kind"] in ("free", "cokernel"):
            out["rank"] = spec.get("rank", 1)
        if spec["kind"] == "quotient-ideal":
            out["ideal"] = [A.format(_poly(A, g, "")) for g in spec.get("ideal", [])]
        if spec["kind"] == "cokernel":
            out["columns"] = [[A.format(_poly(A, e, "")) for e in col] for col in spec.get("columns", [])]
        if spec["kind"] == "sum":
            out["summands"] = list(spec.get("summands", []))
        if "restrict" in spec:
            out["restrict"] = spec["restrict"]
        mods[name] = out
    doc["modules"] = mods
    if inst.command is not None:
        doc["command"] = inst.command
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def load_instance(path: str, max_dim: int = DEFAULT_MAX_DIM) -> Instance:
    """``path`` may be a file or ``bundled:NAME`` for the instances shipped with the package."""
    if path.startswith("bundled:"):
        text = resources.files("indepforge").joinpath(f"instances/{path[8:]}.json").read_text()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return parse_instance(text, max_dim=max_dim)


def bundled_names() -> list[str]:
    root = resources.files("indepforge").joinpath("instances")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


__all__ = ["Instance", "parse_instance", "emit_instance", "validate_document", "load_instance",
           "bundled_names", "dumps", "SCHEMA_VERSION", "IndepForgeError"]
