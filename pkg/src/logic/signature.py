"""
Signature Module

Signature quan hệ: ký hiệu quan hệ với arity, hằng, ký hiệu universal U,
các ký hiệu transitive và ký hiệu phụ Aux.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple

from src.exceptions import SignatureError


@dataclass(frozen=True)
class Signature:
    """
    Signature σ

    Attributes:
        relations: Tuple (name, arity) đã sắp xếp theo tên
        constants: Tên các hằng (đã sắp xếp)
        universal_symbol: Ký hiệu U (binary) hoặc None
        transitive_symbols: Các ký hiệu transitive (binary)
        aux_symbol: Ký hiệu Aux (binary) hoặc None
    """

    relations: Tuple[Tuple[str, int], ...] = ()
    constants: Tuple[str, ...] = ()
    universal_symbol: Optional[str] = None
    transitive_symbols: FrozenSet[str] = field(default_factory=frozenset)
    aux_symbol: Optional[str] = None

    def __post_init__(self):
        rels = tuple(sorted(dict(self.relations).items()))
        if len(rels) != len(self.relations):
            raise SignatureError("Duplicate relation symbol")
        object.__setattr__(self, "relations", rels)
        object.__setattr__(self, "constants", tuple(sorted(set(self.constants))))
        object.__setattr__(self, "transitive_symbols", frozenset(self.transitive_symbols))

        arities = dict(rels)
        for name, arity in rels:
            if not isinstance(arity, int) or arity < 1:
                raise SignatureError(f"Relation {name} must have positive arity, got {arity}")
        clash = set(arities) & set(self.constants)
        if clash:
            raise SignatureError(f"Names used both as relation and constant: {sorted(clash)}")

        special = [("universal", self.universal_symbol), ("aux", self.aux_symbol)]
        special += [("transitive", t) for t in sorted(self.transitive_symbols)]
        for role, name in special:
            if name is None:
                continue
            if name not in arities:
                raise SignatureError(f"{role} symbol {name} is not a declared relation")
            if arities[name] != 2:
                raise SignatureError(f"{role} symbol {name} must be binary")
        if self.universal_symbol is not None and self.universal_symbol in self.transitive_symbols:
            raise SignatureError("Universal symbol cannot be transitive")
        if self.aux_symbol is not None and self.aux_symbol in self.transitive_symbols:
            raise SignatureError("Aux symbol cannot be transitive")

    @classmethod
    def build(
        cls,
        relations: Mapping[str, int],
        constants: Iterable[str] = (),
        universal: Optional[str] = None,
        transitive: Iterable[str] = (),
        aux: Optional[str] = None,
    ) -> "Signature":
        """Tạo signature từ dict relation → arity"""
        return cls(
            relations=tuple(relations.items()),
            constants=tuple(constants),
            universal_symbol=universal,
            transitive_symbols=frozenset(transitive),
            aux_symbol=aux,
        )

    @property
    def arities(self) -> Dict[str, int]:
        return dict(self.relations)

    @property
    def relation_names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    @property
    def width(self) -> int:
        """width(σ) = arity lớn nhất"""
        return max((arity for _, arity in self.relations), default=0)

    def arity(self, name: str) -> int:
        try:
            return self.arities[name]
        except KeyError:
            raise SignatureError(f"Unknown relation symbol {name}")

    def has_relation(self, name: str) -> bool:
        return name in self.arities

    def is_transitive(self, name: str) -> bool:
        return name in self.transitive_symbols

    def extend(
        self,
        relations: Optional[Mapping[str, int]] = None,
        transitive: Iterable[str] = (),
        aux: Optional[str] = None,
        universal: Optional[str] = None,
    ) -> "Signature":
        """Signature mới với các ký hiệu bổ sung (ký hiệu fresh)"""
        merged = self.arities
        for name, arity in (relations or {}).items():
            if name in merged and merged[name] != arity:
                raise SignatureError(f"Relation {name} redeclared with arity {arity}")
            merged[name] = arity
        return Signature.build(
            merged,
            constants=self.constants,
            universal=universal if universal is not None else self.universal_symbol,
            transitive=set(self.transitive_symbols) | set(transitive),
            aux=aux if aux is not None else self.aux_symbol,
        )

    def restrict(self, names: Iterable[str]) -> "Signature":
        """Thu hẹp signature về các quan hệ cho trước"""
        keep = set(names)
        arities = {n: a for n, a in self.relations if n in keep}
        return Signature.build(
            arities,
            constants=self.constants,
            universal=self.universal_symbol if self.universal_symbol in keep else None,
            transitive=[t for t in self.transitive_symbols if t in keep],
            aux=self.aux_symbol if self.aux_symbol in keep else None,
        )

    def without_constants(self) -> "Signature":
        return Signature.build(
            self.arities,
            universal=self.universal_symbol,
            transitive=self.transitive_symbols,
            aux=self.aux_symbol,
        )

    def fresh_name(self, prefix: str, start: int = 0) -> str:
        """Tên fresh đầu tiên dạng prefix + số chưa được dùng"""
        used = set(self.arities) | set(self.constants)
        index = start
        while f"{prefix}{index}" in used:
            index += 1
        return f"{prefix}{index}"

    def header(self) -> str:
        """Header block dạng văn bản (`rel R/3; const c; ...`)"""
        lines = [f"rel {name}/{arity};" for name, arity in self.relations]
        if self.constants:
            lines.append("const " + ", ".join(self.constants) + ";")
        if self.universal_symbol:
            lines.append(f"universal {self.universal_symbol};")
        if self.transitive_symbols:
            lines.append("transitive " + ", ".join(sorted(self.transitive_symbols)) + ";")
        if self.aux_symbol:
            lines.append(f"aux {self.aux_symbol};")
        return "\n".join(lines)
