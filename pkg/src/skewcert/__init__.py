"""skewcert: exact certificates for free subalgebras of skew Laurent
extensions, with Neron-Severi lattice and plane Cremona dynamics."""

__version__ = "0.1.0"
