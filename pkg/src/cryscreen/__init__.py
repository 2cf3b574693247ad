"""Infant-cry asphyxia screening: cepstral features plus a kernel SVM.

The pipeline runs WAV decoding, a fixed 8000-sample window, MFCC-style
feature extraction (168 values per clip by default), mean normalization
with a single global standard deviation, SMO-trained polynomial/RBF
support vector machines, grid-search model selection, and
confusion-matrix evaluation. See the ``cryscreen`` command-line tool for
the end-to-end workflow.
"""

from .audio import AudioClip, decode_wav, encode_wav, fixed_length_window
from .errors import (
    ConfigurationError,
    CryscreenError,
    DegenerateDataError,
    InsufficientAudioError,
    InvalidLabelsError,
    ModelFormatError,
    SplitError,
    UndefinedMetricsError,
    UnsupportedEncodingError,
    WavFormatError,
)
from .features import (
    FeatureConfig,
    MelFilterbank,
    apply_window,
    dct_cepstrum,
    extract_features,
    fft_complex,
    fft_magnitude,
    frame_signal,
    make_mel_filterbank,
    mel_energies,
    pre_emphasize,
)
from .metrics import ConfusionMatrix, MetricsReport, compute_metrics, confusion
from .model_io import load_model, save_model
from .scaling import ScalingParams, apply_scaler, fit_scaler
from .selection import (
    GridSearchResult,
    LabeledDataset,
    SplitSpec,
    gamma_grid,
    grid_search_poly,
    grid_search_rbf,
    refit_final,
    stratified_split,
)
from .svm import (
    KernelSpec,
    SvmModel,
    TrainConfig,
    decision_value,
    decision_values,
    gram_matrix,
    kernel_eval,
    predict,
    predict_many,
    smo_train,
    solve_dual,
)
from .synth import ClassProfile, SynthSpec, generate_corpus, write_corpus

__version__ = "0.1.0"
