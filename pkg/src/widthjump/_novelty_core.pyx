# distutils: language = c++
# cython: boundscheck=False, wraparound=False
"""Compiled seen-set kernel: hashed membership over 64-bit keys.

Same interface as the pure-Python fallback in _novelty_py; the novelty table
picks whichever imported at package load time.
"""

from libcpp.unordered_set cimport unordered_set
from libc.stdint cimport uint64_t, int64_t

DEF PAIR_SHIFT = 32


cdef class SeenSet:
    cdef unordered_set[uint64_t] _seen

    def __len__(self):
        return self._seen.size()

    def contains(self, key):
        return self._seen.count(<uint64_t> key) != 0

    def add_all(self, uint64_t[::1] keys):
        cdef bint any_new = False
        cdef Py_ssize_t i
        for i in range(keys.shape[0]):
            if self._seen.insert(keys[i]).second:
                any_new = True
        return bool(any_new)

    def lookup_any_new(self, uint64_t[::1] keys):
        cdef Py_ssize_t i
        for i in range(keys.shape[0]):
            if self._seen.count(keys[i]) == 0:
                return True
        return False

    def add_pairs(self, uint64_t[::1] flat, int64_t[::1] offsets):
        cdef bint any_new = False
        cdef Py_ssize_t i, j, a, b
        cdef uint64_t x, y, lo, hi, key
        cdef Py_ssize_t n = offsets.shape[0] - 1
        for i in range(n):
            for j in range(i + 1, n):
                for a in range(offsets[i], offsets[i + 1]):
                    x = flat[a]
                    for b in range(offsets[j], offsets[j + 1]):
                        y = flat[b]
                        if x <= y:
                            lo = x; hi = y
                        else:
                            lo = y; hi = x
                        key = ((lo + 1) << PAIR_SHIFT) | hi
                        if self._seen.insert(key).second:
                            any_new = True
        return bool(any_new)

    def lookup_any_new_pairs(self, uint64_t[::1] flat, int64_t[::1] offsets):
        cdef Py_ssize_t i, j, a, b
        cdef uint64_t x, y, lo, hi, key
        cdef Py_ssize_t n = offsets.shape[0] - 1
        for i in range(n):
            for j in range(i + 1, n):
                for a in range(offsets[i], offsets[i + 1]):
                    x = flat[a]
                    for b in range(offsets[j], offsets[j + 1]):
                        y = flat[b]
                        if x <= y:
                            lo = x; hi = y
                        else:
                            lo = y; hi = x
                        key = ((lo + 1) << PAIR_SHIFT) | hi
                        if self._seen.count(key) == 0:
                            return True
        return False
