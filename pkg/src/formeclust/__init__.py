"""formeclust: cluster the running titles of early modern printed books
into the skeleton formes that printed them.

The pipeline quantizes each running-title crop into a symbol string over
its column ink profile, compares titles with Levenshtein distance, reduces
per-position distances over a sheet side with a p-norm, and spectrally
clusters the resulting distance matrix. Scoring against gold annotations
uses V-measure, 1-to-1 (optimal assignment) and many-to-1 accuracy.
"""

from .imposition import (
    BookManifest,
    Format,
    Gathering,
    ManifestError,
    PageRecord,
    SheetSideCoord,
    build_units,
    gold_labels_for_units,
    impose,
    load_manifest,
    make_manifest,
    parse_manifest,
    serialize_manifest,
)
from .kernel import (
    ClusterUnit,
    DistanceMatrix,
    Slot,
    distance_matrix,
    levenshtein,
    title_distance,
    unit_distance,
)
from .metrics import EvalReport, baseline, evaluate, many_to_one, one_to_one, v_measure
from .pipeline import RunConfig, RunResult, run_cluster
from .profiling import (
    QuantizedTitle,
    binarize,
    column_profile,
    load_title_image,
    quantize,
    quantize_image,
)
from .spectral import (
    PRNG_ID,
    ClusterAssignment,
    cluster,
    kmeans,
    knn_graph,
    normalized_laplacian,
    spectral_embedding,
)
from .synth import NoiseSpec, SynthBook, SynthSpec, generate_book, perturb_profile, write_book

__version__ = "0.1.0"
