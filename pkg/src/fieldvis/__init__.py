"""fieldvis: headless visualization engine for gridded scalar/vector fields.

Compute kernels (tracing, isosurfaces, slices, LIC, volume assets, ROI/LOD)
behind a recipe/session layer, a binary frame format for baked animation,
and a WebSocket service for interactive clients.
"""

from .errors import FieldVisError
from .fields import (
    FieldSet,
    GridSpec,
    ScalarField,
    VectorField,
    load_dataset,
    sample_scalar,
    sample_vector,
    save_dataset,
)
from .frames import BakedFrame, decode_frame, encode_frame, load_baked_frame, snapshot_image
from .isosurface import TriangleMesh, extract_isosurface, slider_to_level
from .lod import LodPyramid, RoiContext, build_lod_pyramid, sample_with_lod
from .session import (
    Method,
    RecipeItem,
    VisRecipe,
    bake_animation,
    execute_item,
    execute_recipe,
    load_params,
    save_params,
)
from .slicing import (
    Colormap,
    SliceImage,
    SliceMode,
    SlicePlane,
    lic_slice,
    orient_local_slice,
    orthoslice,
    sample_slice_scalar,
)
from .tracing import (
    ArrowSet,
    Ensemble,
    Polyline,
    Termination,
    TraceOptions,
    advect_ensemble_euler,
    local_arrows,
    scatter_ensemble,
    seed_cone,
    trace_field_line,
    trace_streamline,
)
from .volume import TransferFunction, VolumeTexture, build_volume_texture, composite_preview, evaluate_tf

__version__ = "0.1.0"
