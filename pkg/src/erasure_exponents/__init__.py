"""Error exponents for decoding with an erasure option."""
