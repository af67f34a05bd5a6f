from pathlib import Path

import numpy as np
import pytest

from hfp.geometry import Ball, Intersection
from hfp.problemfile import (
    ProblemFileParseError,
    ProblemFileSemanticError,
    apply_overrides,
    build_problem,
    parse_problem_file,
    parse_problem_text,
    serialize,
)
from hfp.solver import ConvexSubset, FullPower, Single, Singleton

PROBLEMS_DIR = Path(__file__).resolve().parent.parent / "problems"

MINIMAL = """\
[problem]
dimension = 2
rho = 0.0
mu = 1.0
variant = full_power
x1 = 3 4

[set]
kind = ball
center = 0 0
radius = 10

[T]
fixture = proj_affine
normal = 1 1
offset = 2

[S]
fixture = identity

[V]
fixture = zero

[F]
fixture = identity

[schedule]
alpha0 = 1.0
p = 0.5
beta0 = 1.0
q = 0.9
"""


def with_lines(*extra):
    return MINIMAL + "\n" + "\n".join(extra) + "\n"


class TestParsing:
    def test_minimal_parses(self):
        raw = parse_problem_text(MINIMAL)
        assert raw["problem"]["dimension"] == "2"
        assert raw["T"]["fixture"] == "proj_affine"

    def test_round_trip_identity(self):
        raw = parse_problem_text(MINIMAL)
        assert parse_problem_text(serialize(raw)) == raw
        # a second round trip is bit-stable
        assert serialize(parse_problem_text(serialize(raw))) == serialize(raw)

    def test_shipped_files_round_trip(self):
        for name in ("minnorm", "sahu_step", "rotation_fullpower"):
            raw = parse_problem_file(str(PROBLEMS_DIR / f"{name}.cfg"))
            assert parse_problem_text(serialize(raw)) == raw

    def test_garbage_rejected(self):
        with pytest.raises(ProblemFileParseError):
            parse_problem_text("this is not a config\n")

    def test_missing_file(self):
        with pytest.raises(ProblemFileParseError):
            parse_problem_file("/nonexistent/path.cfg")

    def test_missing_section(self):
        text = MINIMAL.replace("[schedule]", "[schedul]")
        with pytest.raises(ProblemFileParseError, match=r"\[schedule\]"):
            parse_problem_text(text)

    def test_unknown_key(self):
        with pytest.raises(ProblemFileParseError, match="wobble"):
            parse_problem_text(MINIMAL + "\n[stop]\nwobble = 1\n")

    def test_unknown_section(self):
        with pytest.raises(ProblemFileParseError, match=r"\[extras\]"):
            parse_problem_text(MINIMAL + "\n[extras]\nfoo = 1\n")

    def test_unknown_fixture(self):
        text = MINIMAL.replace("fixture = zero", "fixture = mystery")
        with pytest.raises(ProblemFileParseError, match="mystery"):
            parse_problem_text(text)

    def test_unknown_variant(self):
        text = MINIMAL.replace("variant = full_power", "variant = newton")
        with pytest.raises(ProblemFileParseError, match="newton"):
            parse_problem_text(text)

    def test_fixture_key_mismatch(self):
        # rotation does not take a contraction factor
        text = MINIMAL.replace(
            "fixture = identity\n\n[V]", "fixture = rotation\nk = 0.5\n\n[V]", 1
        )
        with pytest.raises(ProblemFileParseError):
            parse_problem_text(text)

    def test_intersection_needs_member_sections(self):
        text = MINIMAL.replace(
            "kind = ball\ncenter = 0 0\nradius = 10",
            "kind = intersection\nmembers = a b",
        )
        with pytest.raises(ProblemFileParseError, match=r"set\.a"):
            parse_problem_text(text)


class TestOverrides:
    def test_simple_override(self):
        raw = parse_problem_text(MINIMAL)
        updated = apply_overrides(raw, ["problem.mu=0.5", "schedule.p=0.7"])
        assert updated["problem"]["mu"] == "0.5"
        assert updated["schedule"]["p"] == "0.7"
        assert raw["problem"]["mu"] == "1.0"  # original untouched

    def test_unknown_target_rejected(self):
        raw = parse_problem_text(MINIMAL)
        with pytest.raises(ProblemFileParseError):
            apply_overrides(raw, ["problem.muu=0.5"])
        with pytest.raises(ProblemFileParseError):
            apply_overrides(raw, ["bogus.mu=0.5"])

    def test_malformed_override(self):
        raw = parse_problem_text(MINIMAL)
        with pytest.raises(ProblemFileParseError):
            apply_overrides(raw, ["problem.mu"])
        with pytest.raises(ProblemFileParseError):
            apply_overrides(raw, ["mu=0.5"])


class TestBuild:
    def test_minimal_builds(self):
        built = build_problem(parse_problem_text(MINIMAL))
        assert isinstance(built.spec.C, Ball)
        assert isinstance(built.spec.mode, FullPower)
        assert built.spec.rho == 0.0
        assert np.array_equal(built.spec.x1, [3.0, 4.0])
        assert built.trace_path is None
        assert built.stop.max_iters == 10**5

    def test_variant_reduction_applied(self):
        text = MINIMAL.replace("variant = full_power", "variant = ceng")
        built = build_problem(parse_problem_text(text))
        assert isinstance(built.spec.mode, Single)
        assert built.spec.S.name == "identity"

    def test_fix_set_kinds(self):
        singleton = build_problem(
            parse_problem_text(with_lines("[fix_set]", "kind = singleton", "point = 1 1"))
        )
        assert isinstance(singleton.spec.fix_set, Singleton)

        subset = build_problem(
            parse_problem_text(
                with_lines(
                    "[fix_set]",
                    "kind = convex_subset",
                    "set_kind = hyperplane",
                    "normal = 1 1",
                    "offset = 2",
                    "n_probes = 8",
                )
            )
        )
        assert isinstance(subset.spec.fix_set, ConvexSubset)
        assert subset.spec.fix_set.n_probes == 8

        sampled = build_problem(
            parse_problem_text(
                with_lines("[fix_set]", "kind = sampled", "points = 1 1; 2 0")
            )
        )
        assert len(sampled.spec.fix_set.points) == 2

    def test_stop_tolerances_accept_none(self):
        built = build_problem(
            parse_problem_text(
                with_lines("[stop]", "max_iters = 50", "tol_step = none", "tol_vi = 1e-6")
            )
        )
        assert built.stop.max_iters == 50
        assert built.stop.tol_step is None
        assert built.stop.tol_vi == 1e-6

    def test_intersection_set(self):
        text = MINIMAL.replace(
            "kind = ball\ncenter = 0 0\nradius = 10",
            "kind = intersection\nmembers = a b",
        ) + (
            "\n[set.a]\nkind = ball\ncenter = 0 0\nradius = 10\n"
            "\n[set.b]\nkind = halfspace\nnormal = 1 0\noffset = 5\n"
        )
        built = build_problem(parse_problem_text(text))
        assert isinstance(built.spec.C, Intersection)
        assert len(built.spec.C.members) == 2

    def test_nonnumeric_value(self):
        raw = parse_problem_text(MINIMAL)
        raw["problem"]["mu"] = "lots"
        with pytest.raises(ProblemFileParseError, match="mu"):
            build_problem(raw)

    def test_x1_dimension_mismatch(self):
        raw = parse_problem_text(MINIMAL.replace("x1 = 3 4", "x1 = 3 4 5"))
        with pytest.raises(ProblemFileSemanticError, match="x1"):
            build_problem(raw)

    def test_sahu_step_needs_dim_one(self):
        text = MINIMAL.replace(
            "fixture = proj_affine\nnormal = 1 1\noffset = 2", "fixture = sahu_step"
        )
        with pytest.raises(ProblemFileSemanticError, match="dimension 1"):
            build_problem(parse_problem_text(text))

    def test_marino_xu_needs_wholespace(self):
        text = MINIMAL.replace("variant = full_power", "variant = marino_xu")
        with pytest.raises(ProblemFileSemanticError, match="whole space"):
            build_problem(parse_problem_text(text))

    def test_bad_geometry_is_semantic(self):
        raw = parse_problem_text(MINIMAL)
        raw["set"]["radius"] = "-1"
        with pytest.raises(ProblemFileSemanticError):
            build_problem(raw)

    def test_shipped_files_build(self):
        for name in ("minnorm", "sahu_step", "rotation_fullpower"):
            built = build_problem(parse_problem_file(str(PROBLEMS_DIR / f"{name}.cfg")))
            assert built.spec.C.contains(built.spec.x1)
