"""In-memory cluster state: hosts, instances, and the two capacity views.

A host can be looked at in two accounting modes. The full view subtracts
every resident instance from the host capacity; the normal-only view ignores
resident preemptible instances, exposing the room that eviction could free.
Views are recomputed from the registry on every call; at the cluster sizes
this package targets that is cheaper than keeping caches coherent.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import CapacityExceeded, DuplicateInstance, UnknownHost, UnknownInstance


@dataclass(frozen=True)
class ResourceVector:
    """A (vcpus, ram MB, disk GB) triple ordered component-wise."""

    vcpus: int
    ram: int
    disk: int

    def __add__(self, other: "ResourceVector") -> "ResourceVector":
        return ResourceVector(self.vcpus + other.vcpus, self.ram + other.ram,
                              self.disk + other.disk)

    def __sub__(self, other: "ResourceVector") -> "ResourceVector":
        return ResourceVector(self.vcpus - other.vcpus, self.ram - other.ram,
                              self.disk - other.disk)

    def __le__(self, other: "ResourceVector") -> bool:
        # Partial order: every component must fit. `not (a <= b)` does not
        # imply `b <= a`.
        return (self.vcpus <= other.vcpus and self.ram <= other.ram
                and self.disk <= other.disk)

    def __ge__(self, other: "ResourceVector") -> bool:
        return other <= self

    def nonnegative(self) -> bool:
        return self.vcpus >= 0 and self.ram >= 0 and self.disk >= 0


ZERO = ResourceVector(0, 0, 0)


@dataclass(frozen=True)
class Flavor:
    """Named resource bundle a request asks for."""

    name: str
    vcpus: int
    ram: int
    disk: int

    def __post_init__(self):
        if self.vcpus < 1:
            raise ValueError(f"flavor {self.name!r}: vcpus must be >= 1")
        if self.ram <= 0:
            raise ValueError(f"flavor {self.name!r}: ram must be positive")
        if self.disk < 0:
            raise ValueError(f"flavor {self.name!r}: disk must be >= 0")

    @property
    def resources(self) -> ResourceVector:
        return ResourceVector(self.vcpus, self.ram, self.disk)


def default_flavors() -> dict[str, Flavor]:
    """The stock small/medium/large sizes (vcpus, RAM MB, disk GB)."""
    flavors = [
        Flavor("small", 1, 2000, 20),
        Flavor("medium", 2, 4000, 40),
        Flavor("large", 4, 8000, 80),
    ]
    return {f.name: f for f in flavors}


def zero_disk_flavors() -> dict[str, Flavor]:
    """The stock sizes with zero disk demand.

    Used by the bundled replay fixtures and the benchmark cluster builders,
    where disk never constrains placement (four stock mediums exceed the
    default host's disk but must still fit it).
    """
    flavors = [
        Flavor("small", 1, 2000, 0),
        Flavor("medium", 2, 4000, 0),
        Flavor("large", 4, 8000, 0),
    ]
    return {f.name: f for f in flavors}


#: Capacity of the reference compute node: 8 vCPUs, 16 GB RAM, 140 GB disk.
DEFAULT_HOST_CAPACITY = ResourceVector(8, 16000, 140)


class InstanceKind(enum.Enum):
    NORMAL = "normal"
    PREEMPTIBLE = "preemptible"


class ViewMode(enum.Enum):
    FULL = "full"
    NORMAL_ONLY = "normal_only"


@dataclass
class Instance:
    """A placed VM. `planned_duration` is simulator bookkeeping the scheduler
    never sees."""

    id: str
    flavor: Flavor
    kind: InstanceKind
    host: str
    start_time: int
    planned_duration: int | None = None

    def __post_init__(self):
        if self.start_time < 0:
            raise ValueError(f"instance {self.id!r}: start_time must be >= 0")
        if self.planned_duration is not None and self.planned_duration <= 0:
            raise ValueError(f"instance {self.id!r}: planned_duration must be positive")

    @property
    def resources(self) -> ResourceVector:
        return self.flavor.resources

    @property
    def is_preemptible(self) -> bool:
        return self.kind is InstanceKind.PREEMPTIBLE

    def run_time(self, now: int) -> int:
        """Minutes this instance has been running at simulated time `now`."""
        if now < self.start_time:
            raise ValueError(f"instance {self.id!r}: now={now} precedes start_time")
        return now - self.start_time


@dataclass(frozen=True)
class HostSpec:
    id: str
    capacity: ResourceVector

    def __post_init__(self):
        if self.capacity.vcpus <= 0 or self.capacity.ram <= 0:
            raise ValueError(f"host {self.id!r}: capacity must be positive in vcpus and ram")


def default_host(host_id: str) -> HostSpec:
    return HostSpec(host_id, DEFAULT_HOST_CAPACITY)


@dataclass(frozen=True)
class CapacityView:
    """A host's free resources under one accounting mode, taken at `now`.

    `resident_preemptibles` always lists every preemptible on the host,
    whichever mode produced the view; rank and victim-selection code needs
    them alongside the free vector.
    """

    host: str
    mode: ViewMode
    free: ResourceVector
    resident_preemptibles: tuple[Instance, ...]
    now: int


class Cluster:
    """Registry of hosts and instances with an integer minute clock.

    Single writer: all mutation happens on one logical thread (the
    scheduler/simulator loop). Views are pure reads.
    """

    def __init__(self, hosts=(), clock: int = 0):
        self.hosts: dict[str, HostSpec] = {}
        self.instances: dict[str, Instance] = {}
        self.clock = clock
        for spec in hosts:
            self.add_host(spec)

    def add_host(self, spec: HostSpec) -> None:
        if spec.id in self.hosts:
            raise DuplicateInstance(f"host {spec.id!r} already registered")
        self.hosts[spec.id] = spec

    def host_ids(self) -> list[str]:
        return sorted(self.hosts)

    def instances_on(self, host_id: str) -> list[Instance]:
        if host_id not in self.hosts:
            raise UnknownHost(f"unknown host {host_id!r}")
        return sorted((i for i in self.instances.values() if i.host == host_id),
                      key=lambda i: i.id)

    def view(self, host_id: str, mode: ViewMode) -> CapacityView:
        """Free resources on `host_id` under `mode`; pure, no mutation."""
        spec = self.hosts.get(host_id)
        if spec is None:
            raise UnknownHost(f"unknown host {host_id!r}")
        free = spec.capacity
        preemptibles = []
        for inst in self.instances_on(host_id):
            if inst.is_preemptible:
                preemptibles.append(inst)
                if mode is ViewMode.NORMAL_ONLY:
                    continue
            free = free - inst.resources
        return CapacityView(host_id, mode, free, tuple(preemptibles), self.clock)

    def place(self, instance: Instance) -> None:
        """Register a scheduled instance on its host.

        Callers commit a placement only after any victims have been removed;
        a placement that would leave the full view negative is rejected.
        """
        if instance.id in self.instances:
            raise DuplicateInstance(f"instance {instance.id!r} already registered")
        if instance.host not in self.hosts:
            raise UnknownHost(f"unknown host {instance.host!r}")
        free = self.view(instance.host, ViewMode.FULL).free
        if not (instance.resources <= free):
            raise CapacityExceeded(
                f"instance {instance.id!r} does not fit host {instance.host!r}: "
                f"needs {instance.resources}, free {free}")
        self.instances[instance.id] = instance

    def remove(self, instance_id: str) -> Instance:
        inst = self.instances.pop(instance_id, None)
        if inst is None:
            raise UnknownInstance(f"unknown instance {instance_id!r}")
        return inst

    def total_used(self) -> ResourceVector:
        """Sum of all registered instances' resources (conservation checks)."""
        used = ZERO
        for inst in self.instances.values():
            used = used + inst.resources
        return used
