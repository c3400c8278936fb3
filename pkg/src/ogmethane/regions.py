"""Region vocabulary: countries, their basins, and aggregation groups."""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from enum import Enum

from .errors import DuplicateKeyError, ReferentialIntegrityError, UnknownRegionError


class RegionKind(str, Enum):
    COUNTRY = "Country"
    BASIN = "Basin"
    AGGREGATION_GROUP = "AggregationGroup"


@dataclass(frozen=True, slots=True)
class Region:
    id: str
    kind: RegionKind
    parent: str | None = None
    display_name: str = ""


class RegionRegistry:
    """Read-only lookup of regions by id.

    Basins must point at a Country parent that is part of the same registry;
    countries and aggregation groups have no parent.
    """

    def __init__(self, regions: Iterable[Region] = ()):
        self._regions: dict[str, Region] = {}
        for region in regions:
            self._add(region)
        self.validate()

    def _add(self, region: Region) -> None:
        if region.id in self._regions:
            raise DuplicateKeyError(f"duplicate region id {region.id!r}")
        self._regions[region.id] = region

    def validate(self) -> None:
        for region in self._regions.values():
            check_parent(region, self._regions)

    def __contains__(self, region_id: object) -> bool:
        return region_id in self._regions

    def __getitem__(self, region_id: str) -> Region:
        try:
            return self._regions[region_id]
        except KeyError:
            raise UnknownRegionError(f"unknown region {region_id!r}") from None

    def __iter__(self) -> Iterator[Region]:
        return iter(self._regions.values())

    def __len__(self) -> int:
        return len(self._regions)

    def get(self, region_id: str) -> Region | None:
        return self._regions.get(region_id)

    def ids(self) -> list[str]:
        return sorted(self._regions)

    def countries(self) -> list[Region]:
        return [r for r in self._sorted() if r.kind is RegionKind.COUNTRY]

    def basins_of(self, country_id: str) -> list[Region]:
        return [r for r in self._sorted() if r.kind is RegionKind.BASIN and r.parent == country_id]

    def _sorted(self) -> list[Region]:
        return [self._regions[k] for k in sorted(self._regions)]


def check_parent(region: Region, known: dict[str, Region]) -> None:
    """Raise ReferentialIntegrityError when ``region``'s parent linkage is invalid."""
    if region.kind is RegionKind.BASIN:
        if not region.parent:
            raise ReferentialIntegrityError(f"basin {region.id!r} has no parent country")
        parent = known.get(region.parent)
        if parent is None:
            raise ReferentialIntegrityError(
                f"basin {region.id!r} references unknown parent {region.parent!r}"
            )
        if parent.kind is not RegionKind.COUNTRY:
            raise ReferentialIntegrityError(
                f"basin {region.id!r} parent {region.parent!r} is a {parent.kind.value}, not a Country"
            )
    elif region.parent:
        raise ReferentialIntegrityError(f"{region.kind.value} {region.id!r} must not have a parent")
