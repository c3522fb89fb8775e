from __future__ import annotations

import io
from pathlib import Path
from random import Random

import pytest

from survpath import (
    LayeredNetwork,
    LightpathRouting,
    Limits,
    LogicalTopology,
    PhysicalTopology,
    SurvivalMatrix,
    ValidationError,
    matrix_to_instance,
    packaged_instance,
    read_lnet,
    read_spn,
    write_lnet,
    write_spn,
)
from survpath.instances import RandomEnsembleConfig, gen_random_parallel

from oracles import random_parallel_layered


# ---------------------------------------------------------------------------
# .spn parsing
# ---------------------------------------------------------------------------


def _parse(text: str):
    return read_spn(io.StringIO(text))


def test_minimal_spn_round_values():
    inst = _parse("spn 1\nfibers 3\npath 1: f1 f2\npath 2: f2 f3\npath 3: f1 f3\n")
    assert inst.num_fibers == 3
    mat = inst.matrix()
    assert mat.num_paths == 3
    assert set(mat.path_fibers(1)) == {1, 2}
    assert inst.limits == Limits()


def test_spn_with_limits_and_comments():
    inst = _parse(
        "# parallel instance\nspn 1\n\nfibers 4\nw 2\nk 3\n"
        "path 1: f1 f2\n# middle comment\npath 2: f3\n"
    )
    assert inst.limits == Limits(max_fibers_per_path=3, max_paths_per_fiber=2)
    assert inst.matrix().num_fibers == 4


def test_spn_empty_usage_line_allowed():
    inst = _parse("spn 1\nfibers 2\npath 1:\npath 2: f1 f2\n")
    mat = inst.matrix()
    assert mat.path_cost(1) == 0
    assert mat.survive_mask(1) == mat.all_fibers_mask


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("fibers 2\npath 1: f1\n", "header"),
        ("spn 2\nfibers 2\npath 1: f1\n", "version"),
        ("spn 1\npath 1: f1\n", "fibers"),
        ("spn 1\nfibers 0\npath 1: f1\n", "outside"),
        ("spn 1\nfibers 2\npath 1: f3\n", "fiber"),
        ("spn 1\nfibers 2\npath 1: f1 f1\n", "duplicate fiber"),
        ("spn 1\nfibers 2\npath 1: f1\npath 1: f2\n", "path id"),
        ("spn 1\nfibers 2\npath 2: f1\n", "path id"),
        ("spn 1\nfibers 2\npath 1: x9\n", "token"),
        ("spn 1\nfibers 2\nw 0\npath 1: f1\n", "w"),
        ("spn 1\nfibers 2\nw 2\nw 2\npath 1: f1\n", "w"),
        ("spn 1\nfibers 2\nk 1\npath 1: f1 f2\n", "k"),
        ("spn 1\nfibers 1\nw 1\npath 1: f1\npath 2: f1\n", "bound"),
        ("spn 1\nfibers 2\nw 1\npath 1: f1\npath 2: f1\n", "fiber 1"),
    ],
)
def test_spn_parse_errors(text, fragment):
    with pytest.raises(ValidationError, match=fragment):
        _parse(text)


def test_spn_error_carries_line_number(tmp_path):
    bad = tmp_path / "bad.spn"
    bad.write_text("spn 1\nfibers 2\npath 1: f9\n")
    with pytest.raises(ValidationError, match=r"bad\.spn:3"):
        read_spn(bad)


def test_spn_path_count_capacity_check():
    # Declared W bounds the number of paths any fiber can carry; a file with
    # more paths than W*m cannot satisfy it.
    text = "spn 1\nfibers 1\nw 1\n" + "".join(f"path {j}: f1\n" for j in (1, 2))
    with pytest.raises(ValidationError):
        _parse(text)


def test_spn_canonical_writer_output():
    mat = SurvivalMatrix.from_fiber_sets(3, [[2, 1], [], [3]])
    inst = matrix_to_instance(mat, Limits(max_fibers_per_path=2, max_paths_per_fiber=1))
    buf = io.StringIO()
    write_spn(inst, buf)
    assert buf.getvalue() == (
        "spn 1\nfibers 3\nw 1\nk 2\npath 1: f1 f2\npath 2:\npath 3: f3\n"
    )


def test_spn_round_trip_random(tmp_path):
    rng = Random("spn-roundtrip")
    for idx in range(15):
        cfg = RandomEnsembleConfig(
            num_paths=rng.randint(2, 8),
            num_fibers=rng.randint(4, 10),
            max_paths_per_fiber=rng.randint(2, 4),
            trials=1,
            seed=idx,
        )
        mat = gen_random_parallel(cfg)[0]
        inst = matrix_to_instance(
            mat, Limits(max_paths_per_fiber=cfg.max_paths_per_fiber)
        )
        target = tmp_path / f"rt{idx}.spn"
        write_spn(inst, target)
        again = read_spn(target)
        assert again.matrix() == mat
        assert again.limits.max_paths_per_fiber == cfg.max_paths_per_fiber
        # Writing the parsed instance again is byte-identical (canonical form).
        buf = io.StringIO()
        write_spn(again, buf)
        assert buf.getvalue() == target.read_text()


# ---------------------------------------------------------------------------
# .lnet parsing
# ---------------------------------------------------------------------------


def _two_route_net() -> LayeredNetwork:
    physical = PhysicalTopology(
        nodes=("s", "x", "t"), fibers=(("s", "x"), ("x", "t"), ("s", "t"))
    )
    logical = LogicalTopology(
        nodes=("s", "t"), links=(("s", "t"), ("s", "t")), source="s", sink="t"
    )
    return LayeredNetwork(
        physical=physical, logical=logical, routing=LightpathRouting(routes=((1, 2), (3,)))
    )


def test_lnet_canonical_writer_output():
    buf = io.StringIO()
    write_lnet(_two_route_net(), buf)
    assert buf.getvalue() == (
        "lnet 1\n"
        "pnodes s x t\n"
        "pfibers\n"
        "1 s x\n"
        "2 x t\n"
        "3 s t\n"
        "lnodes s t\n"
        "llinks\n"
        "1 s t: 1 2\n"
        "2 s t: 3\n"
        "st s t\n"
    )


def test_lnet_round_trip_equality():
    net = _two_route_net()
    buf = io.StringIO()
    write_lnet(net, buf)
    again = read_lnet(io.StringIO(buf.getvalue()))
    assert again == net
    assert not again.logical.directed


def test_lnet_directed_round_trip():
    physical = PhysicalTopology(nodes=("s", "t"), fibers=(("s", "t"),))
    logical = LogicalTopology(
        nodes=("s", "t"), links=(("s", "t"),), source="s", sink="t", directed=True
    )
    net = LayeredNetwork(
        physical=physical, logical=logical, routing=LightpathRouting(routes=((1,),))
    )
    buf = io.StringIO()
    write_lnet(net, buf)
    assert buf.getvalue().startswith("lnet 1 directed\n")
    again = read_lnet(io.StringIO(buf.getvalue()))
    assert again == net
    assert again.logical.directed


def test_lnet_round_trip_random_layered():
    rng = Random("lnet-roundtrip")
    for _ in range(20):
        net = random_parallel_layered(rng)
        buf = io.StringIO()
        write_lnet(net, buf)
        assert read_lnet(io.StringIO(buf.getvalue())) == net


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("pnodes s t\n", "header"),
        ("lnet 1 sideways\npnodes s t\n", "flag"),
        ("lnet 1\nlnodes s t\n", "pnodes"),
        ("lnet 1\npnodes s t\npfibers\n2 s t\n", "fiber id"),
        (
            "lnet 1\npnodes s t\npfibers\n1 s t\nlnodes s t\nllinks\n1 s t: 1\n",
            "st",
        ),
        (
            "lnet 1\npnodes s t\npfibers\n1 s t\nlnodes s t\nllinks\n1 s t: 9\nst s t\n",
            "fiber",
        ),
        (
            "lnet 1\npnodes s t\npfibers\n1 s t\nlnodes s t\nllinks\n1 s t: 1\nst s t\nextra\n",
            "trailing",
        ),
    ],
)
def test_lnet_parse_errors(text, fragment):
    with pytest.raises(ValidationError, match=fragment):
        read_lnet(io.StringIO(text))


# ---------------------------------------------------------------------------
# Packaged instances
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "name, fibers, paths",
    [
        ("pairwise3.spn", 3, 3),
        ("uncoverable.spn", 2, 2),
        ("nonadditive.spn", 8, 4),
    ],
)
def test_packaged_instances_parse(name, fibers, paths):
    location = packaged_instance(name)
    assert Path(str(location)).name == name
    inst = read_spn(location)
    assert inst.num_fibers == fibers
    assert inst.matrix().num_paths == paths


def test_unknown_packaged_instance():
    with pytest.raises(ValidationError):
        packaged_instance("missing.spn")
