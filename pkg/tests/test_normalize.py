from hypothesis import given
from hypothesis import strategies as st

from dialogue_acts.normalize import NormalizationOptions, normalize_text


def test_diacritics_and_alef_folding():
    assert normalize_text("أَهْلاً") == "اهلا"


def test_non_arabic_passthrough():
    assert normalize_text("hello") == "hello"


def test_teh_marbuta_and_alef_maqsura():
    assert normalize_text("مكتبة") == "مكتبه"
    assert normalize_text("على") == "علي"


def test_tatweel_removed():
    assert normalize_text("شكـــرا") == "شكرا"


def test_whitespace_collapsed():
    assert normalize_text("  اهلا \t وسهلا \n") == "اهلا وسهلا"


def test_options_disable_rules():
    opts = NormalizationOptions(fold_teh_marbuta=False)
    assert normalize_text("مكتبة", opts) == "مكتبة"


arabic_ish = st.text(
    alphabet=st.characters(min_codepoint=0x20, max_codepoint=0x6FF),
    max_size=40,
)


@given(arabic_ish)
def test_idempotent(s):
    once = normalize_text(s)
    assert normalize_text(once) == once


@given(arabic_ish)
def test_never_longer(s):
    assert len(normalize_text(s)) <= len(s)
