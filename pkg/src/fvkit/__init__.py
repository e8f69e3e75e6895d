"""fvkit: computation and verification toolkit for Dirichlet-process Markov
chains, Polya-urn overlap distributions, and the Fleming-Viot transition
function built from them."""

__version__ = "0.1.0"
