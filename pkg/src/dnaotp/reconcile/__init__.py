from .bch import BchCode, DecodeFailure
from .params import CodeSelection, NoFeasibleCode, select_params, binomial_tail_gt
from .otp import (Ciphertext, MaskExhausted, MaskReuse, consume_and_destroy,
                  otp_open, otp_seal, read_ciphertext, write_ciphertext,
                  bytes_to_bits, bits_to_bytes)
from .sync import parity_for_mask, correct_mask

__all__ = [
    "BchCode", "DecodeFailure", "CodeSelection", "NoFeasibleCode",
    "select_params", "binomial_tail_gt", "Ciphertext", "MaskExhausted",
    "MaskReuse", "consume_and_destroy", "otp_open", "otp_seal",
    "read_ciphertext", "write_ciphertext", "bytes_to_bits", "bits_to_bytes",
    "parity_for_mask", "correct_mask",
]
