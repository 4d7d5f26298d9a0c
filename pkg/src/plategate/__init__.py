"""License-plate reading pipeline plus a parking-gate access-control service.

The recognition chain turns a camera frame into a validated plate
string: localization by edge density, skew estimation from ink moments,
rectification to a canonical strip, contrast enhancement, Otsu
binarization, frame-line stripping, projection-profile segmentation,
template-matching OCR, and grammar validation with confusion-pair
correction. `consensus` fuses reads across frames; `gatekeeper` turns
fused reads into gate decisions against white/black lists.
"""

from .consensus import ConsensusResult, FrameObservation, fuse, window_ready
from .corpus import FrameSpec, generate_corpus, load_manifest, render_frame, sample_spec
from .evaluate import EvalSummary, FrameScore, evaluate_manifest
from .glyphs import GlyphTemplate, default_templates, load_templates, save_templates
from .grammar import (
    ConfusionTable,
    PlateGrammar,
    ValidationReport,
    default_grammar,
    load_grammar,
    validate,
)
from .imgio import ImageDecodeError, decode_image, load_image
from .locate import CanonicalPlate, LocalizerParams, PlateCandidate, estimate_skew, locate_plates, rectify
from .ocr import BinaryRaster, CharRead, PlateRead, read_plate, segment_characters
from .pipeline import FrameResult, PlateResult, dump_stages, recognize_bytes, recognize_frame
from .raster import ColorRaster, GrayRaster, median_filter, normalize_contrast, otsu_threshold, sobel_components, to_grayscale

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ColorRaster", "GrayRaster", "BinaryRaster",
    "to_grayscale", "otsu_threshold", "sobel_components", "median_filter", "normalize_contrast",
    "ImageDecodeError", "decode_image", "load_image",
    "LocalizerParams", "PlateCandidate", "CanonicalPlate",
    "locate_plates", "estimate_skew", "rectify",
    "GlyphTemplate", "default_templates", "load_templates", "save_templates",
    "CharRead", "PlateRead", "read_plate", "segment_characters",
    "PlateGrammar", "ConfusionTable", "ValidationReport",
    "default_grammar", "load_grammar", "validate",
    "FrameResult", "PlateResult", "recognize_frame", "recognize_bytes", "dump_stages",
    "ConsensusResult", "FrameObservation", "fuse", "window_ready",
    "FrameSpec", "sample_spec", "render_frame", "generate_corpus", "load_manifest",
    "EvalSummary", "FrameScore", "evaluate_manifest",
]
