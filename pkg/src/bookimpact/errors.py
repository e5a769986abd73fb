"""Exception hierarchy shared by all engine modules."""


class BookImpactError(Exception):
    """Base class for every error raised by this package."""


# --- ingestion ---------------------------------------------------------------

class MalformedRecord(BookImpactError):
    """An input line could not be parsed into a valid record."""

    def __init__(self, path: str, line: int, reason: str):
        super().__init__(f"{path}:{line}: {reason}")
        self.path = str(path)
        self.line = line
        self.reason = reason


class DuplicateKey(BookImpactError):
    """Two records claim the same identity (isbn, record id, respondent)."""


class MissingMandatoryFile(BookImpactError):
    """The manifest omits a file that ingestion cannot proceed without."""


class IoFailure(BookImpactError):
    """Reading or writing a snapshot/export failed at the OS level."""


class VersionMismatch(BookImpactError):
    """A snapshot was written by an incompatible format version."""


# --- text mining --------------------------------------------------------------

class UnknownProfile(BookImpactError):
    """Tokenizer profile id is not one of the registered profiles."""


class EmptyDocument(BookImpactError):
    """A topic-model corpus contains a document with no tokens."""

    def __init__(self, index: int):
        super().__init__(f"document {index} is empty")
        self.index = index


class DegenerateCorpus(BookImpactError):
    """Corpus vocabulary is too small to fit a topic model."""


class MissingClass(BookImpactError):
    """Classifier training data lacks examples for a required class."""

    def __init__(self, label: str):
        super().__init__(f"no training examples for class {label!r}")
        self.label = label


# --- weighting ----------------------------------------------------------------

class MissingRating(BookImpactError):
    """No respondent rated every item of a questionnaire level group."""


class DimensionMismatch(BookImpactError):
    """Pairwise matrices being combined do not share shape or level tag."""


class NonConvergence(BookImpactError):
    """Power iteration hit its cap before the eigenvalue stabilised."""

    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"no convergence after {iterations} iterations (residual {residual:.3e})"
        )
        self.residual = residual
        self.iterations = iterations


# --- metrics / scoring ----------------------------------------------------------

class NotADistribution(BookImpactError):
    """Vector handed to an entropy routine is not a probability vector."""


class NegativeInput(BookImpactError):
    """A raw metric value reached normalization without the required shift."""


class NoPresentMetrics(BookImpactError):
    """A book has zero usable evidence under the renormalizing policy."""


# --- analysis -------------------------------------------------------------------

class LengthMismatch(BookImpactError):
    """Paired samples have different lengths."""


class ZeroVariance(BookImpactError):
    """A correlation input is constant, so the coefficient is undefined."""


class InsufficientOverlap(BookImpactError):
    """Fewer than two books carry both an engine score and an expert score."""


class InsufficientData(BookImpactError):
    """Not enough paired observations for the requested estimate."""


class UnknownBook(BookImpactError):
    """Requested isbn does not exist in the dataset."""
