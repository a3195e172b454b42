"""Arabic-aware text normalization.

Folding rules target dialectal Arabic as typed in call-center transcripts:
diacritics (tashkeel) are noise, alef/yeh/teh-marbuta variants are spelled
inconsistently, and tatweel is purely decorative. All rules are optional so
raw text can be preserved for error analysis.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# Harakat plus the Quranic annotation blocks. Removing the wider range keeps
# the function idempotent on already-normalized text.
_TASHKEEL_RE = re.compile(
    "[ؐ-ًؚ-ٰٟۖ-ۜ۟-۪ۤۧۨ-ۭ]"
)
_ALEF_RE = re.compile("[آأإ]")  # alef madda/hamza variants -> bare alef
_WS_RE = re.compile(r"\s+")

_TATWEEL = "ـ"
_ALEF_MAQSURA = "ى"
_YEH = "ي"
_TEH_MARBUTA = "ة"
_HEH = "ه"


@dataclass(frozen=True)
class NormalizationOptions:
    strip_tashkeel: bool = True
    fold_alef: bool = True
    fold_alef_maqsura: bool = True
    fold_teh_marbuta: bool = True
    strip_tatweel: bool = True
    collapse_whitespace: bool = True


DEFAULT_OPTIONS = NormalizationOptions()


def normalize_text(raw: str, options: NormalizationOptions = DEFAULT_OPTIONS) -> str:
    """Apply the enabled folding rules. Total and idempotent."""
    text = raw
    if options.strip_tashkeel:
        text = _TASHKEEL_RE.sub("", text)
    if options.fold_alef:
        text = _ALEF_RE.sub("ا", text)
    if options.fold_alef_maqsura:
        text = text.replace(_ALEF_MAQSURA, _YEH)
    if options.fold_teh_marbuta:
        text = text.replace(_TEH_MARBUTA, _HEH)
    if options.strip_tatweel:
        text = text.replace(_TATWEEL, "")
    if options.collapse_whitespace:
        text = _WS_RE.sub(" ", text).strip()
    return text
