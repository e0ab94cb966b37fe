import pytest

from splitweave.core import CanvasSpec, Color, Layer, Program, field, node

MINIMAL_TEXT = (
    '(pattern (canvas :width 256 :height 256 :background "#FFFFFF") '
    '(layer (grid :rows 2 :cols 2) '
    '(fill :color (cycle :key id :colors ("#112233" "#445566")))))'
)


@pytest.fixture
def minimal_text():
    return MINIMAL_TEXT


@pytest.fixture
def minimal_program():
    return Program(
        CanvasSpec(256, 256, Color.parse("#FFFFFF")),
        (Layer(node("grid", rows=2, cols=2),
               styles=(node("fill", color=field(
                   "cycle", key="id",
                   values=(Color.parse("#112233"), Color.parse("#445566")))),)),),
    )


@pytest.fixture
def canvas100():
    return CanvasSpec(100, 100, Color.parse("#FFFFFF"))
