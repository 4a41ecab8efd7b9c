from conftest import make_span

from heatmon.model import PLACEHOLDER, normalize_return_code


def test_http_code_passes_through():
    assert normalize_return_code("429") == "429"


def test_non_http_code_passes_through():
    assert normalize_return_code("-1") == "-1"


def test_absent_code_gets_placeholder():
    assert normalize_return_code(None) == PLACEHOLDER


def test_empty_and_whitespace_codes_get_placeholder():
    assert normalize_return_code("") == PLACEHOLDER
    assert normalize_return_code("   ") == PLACEHOLDER


def test_code_is_trimmed():
    assert normalize_return_code(" 500 ") == "500"


def test_span_unit_conversions():
    span = make_span(start_ms=120_000, duration_us=2_500_000)
    assert span.start_ms == 120_000
    assert span.duration_ms == 2500.0
