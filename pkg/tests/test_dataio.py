"""CSV parsing/serialisation for outcome tables, states and reports."""

import math
from importlib import resources

import numpy as np
import pytest

from jointmeas import (
    DataQualityWarning,
    DataValidationError,
    DensityMatrix,
    bundled_distribution,
    bundled_state,
    emit_density_matrix,
    emit_distribution,
    emit_report,
    epr_state,
    evaluate_relations,
    fidelity,
    joint_distribution,
    load_distribution,
    parse_density_matrix,
    parse_distribution,
    save_distribution,
)
from jointmeas.qcore import PROFILES

GOOD_TABLE = """\
# theta_deg=90
# phi_deg=180
# r_h=0.1244
# r_v=0.4645
m,y,w,p,sigma
1,1,1,0.282,0.002
1,1,-1,0.112,0.002
1,-1,1,0.157,0.002
1,-1,-1,0.162,0.002
-1,1,1,0.0363,0.0007
-1,1,-1,0.0607,0.0009
-1,-1,1,0.0614,0.0009
-1,-1,-1,0.129,0.002
"""


def test_parse_distribution_golden():
    dist = parse_distribution(GOOD_TABLE)
    assert dist.provenance == "measured"
    assert dist.prob(1, 1, 1) == 0.282
    assert dist.prob(-1, 1, -1) == 0.0607
    assert dist.sigmas[(-1, 1, 1)] == 0.0007
    assert dist.metadata == {"theta_deg": "90", "phi_deg": "180",
                             "r_h": "0.1244", "r_v": "0.4645"}
    assert dist.total() == pytest.approx(1.0004, abs=1e-12)


def test_parse_distribution_errors():
    with pytest.raises(DataValidationError, match="no header row"):
        parse_distribution("# only=metadata\n")
    with pytest.raises(DataValidationError, match="header must be"):
        parse_distribution("m,y,w,p\n")
    bad_outcome = GOOD_TABLE.replace("1,1,1,0.282", "2,1,1,0.282")
    with pytest.raises(DataValidationError, match=r"column 'm' must be \+1 or -1, got 2"):
        parse_distribution(bad_outcome)
    not_int = GOOD_TABLE.replace("-1,-1,-1,0.129", "-1,-1,x,0.129")
    with pytest.raises(DataValidationError, match="column 'w' must be an integer"):
        parse_distribution(not_int)
    bad_p = GOOD_TABLE.replace("0.282", "n/a")
    with pytest.raises(DataValidationError, match="column 'p' must be a float"):
        parse_distribution(bad_p)
    dup = GOOD_TABLE.replace("1,1,-1,0.112", "1,1,1,0.112")
    with pytest.raises(DataValidationError, match=r"line 7: duplicate outcome triple \(1, 1, 1\)"):
        parse_distribution(dup)
    short = "\n".join(GOOD_TABLE.splitlines()[:-1]) + "\n"
    with pytest.raises(DataValidationError, match="expected 8 outcome triples, found 7"):
        parse_distribution(short)
    wide = GOOD_TABLE.replace("1,1,1,0.282,0.002", "1,1,1,0.282,0.002,9")
    with pytest.raises(DataValidationError, match="expected 5 columns, got 6"):
        parse_distribution(wide)


def test_parse_distribution_mass_gate():
    scaled = GOOD_TABLE.replace("0.282", "0.582")
    with pytest.raises(DataValidationError, match=r"sum to 1.3004, outside 1 \+- 0.01"):
        parse_distribution(scaled)
    # the relaxed profile is wider but still rejects this table
    with pytest.raises(DataValidationError, match=r"\+- 0.05"):
        parse_distribution(scaled, tolerances=PROFILES["relaxed"])


def test_distribution_roundtrip_bytes():
    """emit . parse is the identity on the packaged tables."""
    for name in ("measured_phi157.5.csv", "measured_phi180.csv",
                 "measured_phi225.csv"):
        text = resources.files("jointmeas.data").joinpath(name).read_text()
        assert emit_distribution(parse_distribution(text)) == text


def test_distribution_roundtrip_simulated(reference):
    rho, slide, w = reference
    dist = joint_distribution(rho, slide, w)
    back = parse_distribution(emit_distribution(dist), provenance="simulated")
    for key, val in dist.entries.items():
        assert back.entries[key] == pytest.approx(val, abs=1e-12)
    assert back.metadata["phi_deg"] == "180.0"
    assert back.sigmas is None


def test_save_and_load_distribution(tmp_path):
    dist = parse_distribution(GOOD_TABLE)
    path = tmp_path / "table.csv"
    save_distribution(dist, path)
    again = load_distribution(path)
    assert again.entries == dist.entries
    assert again.sigmas == dist.sigmas


def test_parse_density_matrix_roundtrip():
    text = resources.files("jointmeas.data").joinpath(
        "tomographic_state.csv").read_text()
    rho = parse_density_matrix(text)
    assert emit_density_matrix(rho) == text
    assert rho.min_eigenvalue > 0.0


def test_bundled_state_against_ideal():
    rho = bundled_state()
    assert fidelity(rho, epr_state(math.radians(22.5))) == pytest.approx(
        0.9739453824641016, abs=1e-12)
    assert rho.min_eigenvalue == pytest.approx(0.0014996094439817531, abs=1e-15)


def density_text(mat):
    lines = ["row,col,re,im"]
    for r in range(mat.shape[0]):
        for c in range(mat.shape[1]):
            lines.append(f"{r},{c},{mat[r, c].real:.12g},{mat[r, c].imag:.12g}")
    return "\n".join(lines) + "\n"


def test_parse_density_matrix_gates():
    bad_trace = density_text(np.diag([0.4, 0.3, 0.1, 0.1]).astype(complex))
    with pytest.raises(DataValidationError, match="trace is 0.900000"):
        parse_density_matrix(bad_trace)

    skew = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
    skew[0, 1] = 0.2
    with pytest.raises(DataValidationError, match="not Hermitian"):
        parse_density_matrix(density_text(skew))

    negative = density_text(np.diag([0.6, 0.404, 0.0, -0.004]).astype(complex))
    with pytest.raises(DataValidationError, match="not a state"):
        parse_density_matrix(negative)

    slightly = density_text(np.diag([0.6, 0.4005, 0.0, -0.0005]).astype(complex))
    with pytest.warns(DataQualityWarning, match="slightly negative"):
        rho = parse_density_matrix(slightly)
    assert rho.min_eigenvalue == pytest.approx(-0.0005, abs=1e-12)
    assert rho.psd_warning


def test_parse_density_matrix_structure_errors():
    with pytest.raises(DataValidationError, match="expected 16 matrix entries, found 1"):
        parse_density_matrix("0,0,1,0\n")
    with pytest.raises(DataValidationError, match=r"outside a 4x4 matrix"):
        parse_density_matrix("0,4,1,0\n")
    with pytest.raises(DataValidationError, match="duplicate entry"):
        parse_density_matrix("0,0,0.5,0\n0,0,0.5,0\n")
    with pytest.raises(DataValidationError, match="expected row,col,re,im"):
        parse_density_matrix("0,0,1\n")
    # other dimensions work through the dim parameter
    rho = parse_density_matrix("0,0,0.5,0\n0,1,0,0\n1,0,0,0\n1,1,0.5,0\n", dim=2)
    assert rho.dim == 2


def test_bundled_distribution_lookup():
    dist = bundled_distribution(157.5)
    assert dist.metadata["phi_deg"] == "157.5"
    assert dist.total() == pytest.approx(1.0007, abs=1e-12)
    with pytest.raises(FileNotFoundError, match="measured_phi135.csv"):
        bundled_distribution(60)


def test_bundled_distribution_rejects_inconsistent_mass():
    with pytest.raises(DataValidationError, match="sum to 1.4381"):
        bundled_distribution(135)


def test_emit_report_json():
    report = evaluate_relations(0.5, 0.25, 1.0, 2.0, 0.75, 1.5, 1.0,
                                scenario={"phi_deg": 180.0})
    text = emit_report(report, "json")
    assert text.endswith("\n")
    assert '"arthurs_kelly": 0.125' in text
    assert '"bound": 0.5' in text


def test_emit_report_rounds_to_twelve_digits():
    text = emit_report({"value": 1.0 / 3.0}, "json")
    assert "0.333333333333" in text
    assert "3333333333333" not in text


def test_emit_report_csv_union_of_columns():
    rows = [{"a": 1.0, "nested": {"x": 2.0}}, {"a": 3.0, "b": 4.0}]
    text = emit_report(rows, "csv")
    lines = text.splitlines()
    assert lines[0] == "a,nested.x,b"
    assert lines[1] == "1.0,2.0,"
    assert lines[2] == "3.0,,4.0"


def test_emit_report_unknown_format():
    with pytest.raises(ValueError, match="unknown output format"):
        emit_report({"a": 1.0}, "yaml")
