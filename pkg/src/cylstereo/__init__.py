"""Stereo rendering for cylindrical screens.

The pipeline renders a scene into four cubemaps offset to the cardinal
directions around the tracked head, culls cubemap faces down to the set
the canvas sampler will actually touch, and samples those faces per
fragment into a left/right cylindrical canvas pair. A slit-stitching
baseline and a direct raytrace oracle make the pipeline's pass counts and
image quality measurable.
"""

from .analysis import (
    BenchRow,
    DiffReport,
    bench_csv,
    bench_sweep,
    disparity_probe,
    image_diff,
    stereo_diff,
)
from .errors import (
    CullingViolationError,
    CylstereoError,
    DegenerateDirectionError,
    DegenerateFrustumError,
    InputDomainError,
    ProbeMissError,
    SceneParseError,
)
from .geometry import (
    CARDINAL_ORDER,
    DEFAULT_IPD,
    FACE_ORDER,
    Cardinal,
    Eye,
    Face,
    Frustum,
    HeadPose,
    ScreenConfig,
    canvas_to_azimuth,
    cavern_screen,
    centered_head,
    cubemap_centers,
    direction_for_face_uv,
    eye_positions,
    face_for_direction,
    fragment_world_point,
    off_axis_frustum,
    select_cubemap,
    validate_head,
    visible_faces,
    visible_faces_bruteforce,
)
from .images import CanvasImage, parse_ppm, ppm_bytes, read_image, write_image
from .projection import (
    SampleTrace,
    StereoCanvas,
    compose,
    render_scs,
    render_scs_center_mode,
    sample_fragment,
)
from .render import CubemapSet, FaceImage, render_cubemaps, render_face, render_oracle, render_planar
from .scene import (
    Hit,
    Marker,
    Quad,
    Scene,
    Sphere,
    bundled_scene_names,
    intersect,
    load_bundled_scene,
    load_scene,
    parse_scene,
    serialize_scene,
    shade,
)
from .stitch import StitchConfig, render_stitch, slit_geometry

__version__ = "0.1.0"
