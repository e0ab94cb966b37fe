"""SplitWeave: a deterministic visual-pattern DSL with program samplers,
edit operators and an analogical-quartet dataset generator."""

from .core import (
    CanvasSpec, Color, Diagnostic, FieldExpr, Layer, Node, NodePath, Program,
    ast_equals, field, field_range, node, resolve_path, substitute, validate,
)
from .edits import (
    EditDescriptor, NodeSelector, apply_edit, is_compatible, parse_edit,
    print_edit, sample_edit,
)
from .errors import (
    AxisUnavailable, DegenerateSites, FieldTypeError, IncompatibleEdit,
    InvalidResult, IoError, KindMismatch, MotifParseError, PathNotFound,
    RangeError, SamplingExhausted, SplitWeaveError, StructureMismatch,
    UnknownMotif, UnsupportedTopology,
)
from .fields import FieldContext, eval_field
from .geometry import (
    Fragment, FragmentSet, merge_fragments, polygon_inset, split_brick,
    split_grid, split_stripes, split_voronoi,
)
from .motifs import MotifDef, MotifRegistry, builtin_registry, load_motif_library
from .palette import Palette, sample_palette
from .parser import ParseError, SemanticError, SourceSpan, parse, print_program
from .quartets import (
    DatasetManifest, Quartet, audit_dataset, make_quartet, quartet_images,
    write_dataset,
)
from .render import (
    PatternImage, RenderOptions, SceneGraph, emit_svg, interpolate_programs,
    interpret, render,
)
from .samplers import DEFAULT_CONFIG, SamplerConfig, sample_mtp, sample_program, sample_sfp

__version__ = "0.1.0"
