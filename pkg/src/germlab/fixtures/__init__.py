"""Bundled example specs: the three canonical algebras, a generated germ
on Z_2 and a germ that fails every positivity check."""

from importlib import resources

NAMES = (
    "newton.json",
    "wiener.json",
    "poisson.json",
    "z2_germ.json",
    "invalid_germ.json",
)


def fixture_path(name: str) -> str:
    """Filesystem path of a bundled fixture."""
    if name not in NAMES:
        raise KeyError("unknown fixture %r (have: %s)" % (name, ", ".join(NAMES)))
    return str(resources.files(__package__) / name)
