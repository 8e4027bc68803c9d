"""Modal Lambek calculus with extraction and island modalities, plus a
compositional tensor-network semantics."""

from .formula import (
    Atom,
    Box,
    Dia,
    Formula,
    FormulaError,
    Mode,
    Over,
    Polarity,
    Tensor,
    Under,
    parse_formula,
    print_formula,
)
from .prover import (
    Arrow,
    ProofTerm,
    Prover,
    ProverError,
    SearchConfig,
    derive_sentence,
    prove,
    validate,
)
from .diagram import (
    Diagram,
    DiagramError,
    Node,
    box,
    cap,
    compose,
    cup,
    dual_type,
    frobenius_network,
    identity,
    normalize,
    permutation,
    spider,
    swap,
    tensor_par,
)
from .translate import (
    AxiomLinking,
    compile_sentence,
    extract_axiom_links,
    interpret_proof,
    interpret_type,
    link_diagram,
    proof_meaning,
)
from .tensor import (
    TensorError,
    TensorStore,
    closed_form_1d,
    eval_diagram,
    oracle_eval,
)
from .lexicon import (
    LexEntry,
    Lexicon,
    LexiconError,
    builtin_lexicon,
    conjoin_states,
    is_conjoinable,
)

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "Box",
    "Dia",
    "Formula",
    "FormulaError",
    "Mode",
    "Over",
    "Polarity",
    "Tensor",
    "Under",
    "parse_formula",
    "print_formula",
    "Arrow",
    "ProofTerm",
    "Prover",
    "ProverError",
    "SearchConfig",
    "derive_sentence",
    "prove",
    "validate",
    "Diagram",
    "DiagramError",
    "Node",
    "box",
    "cap",
    "compose",
    "cup",
    "dual_type",
    "frobenius_network",
    "identity",
    "normalize",
    "permutation",
    "spider",
    "swap",
    "tensor_par",
    "AxiomLinking",
    "compile_sentence",
    "extract_axiom_links",
    "interpret_proof",
    "interpret_type",
    "link_diagram",
    "proof_meaning",
    "TensorError",
    "TensorStore",
    "closed_form_1d",
    "eval_diagram",
    "oracle_eval",
    "LexEntry",
    "Lexicon",
    "LexiconError",
    "builtin_lexicon",
    "conjoin_states",
    "is_conjoinable",
    "__version__",
]
