import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discdist.algebra import HomogeneousPoly, dimension
from discdist.errors import ParseError
from discdist.polyio import format_poly, parse_poly, read_poly, write_poly


@given(
    n=st.integers(2, 4),
    d=st.integers(1, 5),
    data=st.data(),
)
def test_roundtrip_is_bit_exact(n, d, data):
    vals = data.draw(
        st.lists(
            st.floats(allow_nan=False, allow_infinity=False, width=64),
            min_size=dimension(n, d),
            max_size=dimension(n, d),
        )
    )
    P = HomogeneousPoly(n, d, vals)
    Q = parse_poly(format_poly(P))
    assert Q.coeffs == P.coeffs


def test_file_roundtrip(tmp_path):
    P = HomogeneousPoly.from_dict(3, 2, {(2, 0, 0): 0.1, (0, 1, 1): -3.25})
    f = tmp_path / "p.poly"
    write_poly(P, f, comments=["test"])
    assert "# test" in f.read_text()
    assert read_poly(f) == P


def test_comments_and_blank_lines():
    P = parse_poly("# hi\n\nhomopoly 2 2  # header\n2 0 1.5\n\n0 2 -1 # tail\n")
    assert P.coeffs == {(2, 0): 1.5, (0, 2): -1.0}


@pytest.mark.parametrize(
    "text",
    [
        "",
        "poly 2 2\n",
        "homopoly 2\n",
        "homopoly 1 2\n",
        "homopoly 2 2\n2 0\n",
        "homopoly 2 2\n1 0 1.0\n",
        "homopoly 2 2\n2 0 1\n2 0 2\n",
        "homopoly 2 2\n2 0 abc\n",
        "homopoly 2 2\n-1 3 1\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_poly(text)
