"""Role-labelled random streams derived from one master seed.

Each role gets SeedSequence(master, spawn_key=(crc32(role),)), so adding a
role never shifts the draws of another.
"""

import zlib

import numpy as np

ROLES = ("nature", "common", "x", "y")


def role_stream(master_seed: int, role: str) -> np.random.Generator:
    key = zlib.crc32(role.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=(key,)))


def session_streams(master_seed: int, roles=ROLES) -> dict:
    return {r: role_stream(master_seed, r) for r in roles}
