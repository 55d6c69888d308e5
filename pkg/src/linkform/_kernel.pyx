# distutils: language = c++
"""Compiled graph kernel.

Adjacency is kept as sorted int32 vectors; membership and common-neighbour
queries walk the shorter list and binary-search the longer one.
"""
from libc.stdint cimport int8_t, int32_t, int64_t
from libcpp.vector cimport vector
from libcpp.algorithm cimport lower_bound
from cython.operator cimport dereference as deref

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    ADDED = 0
    DUPLICATE = 1
    SELF_LOOP = 2


cdef inline bint _contains(vector[int32_t]& vec, int32_t x) noexcept nogil:
    cdef vector[int32_t].iterator it = lower_bound(vec.begin(), vec.end(), x)
    return it != vec.end() and deref(it) == x


cdef inline void _sorted_insert(vector[int32_t]& vec, int32_t x) noexcept nogil:
    cdef vector[int32_t].iterator it = lower_bound(vec.begin(), vec.end(), x)
    vec.insert(it, x)


cdef class GraphCore:
    """Undirected simple graph with per-node degree and triangle counters."""

    cdef vector[vector[int32_t]] _adj
    cdef vector[int64_t] _tri
    cdef int64_t _n_edges

    backend = "compiled"

    def __cinit__(self):
        self._n_edges = 0

    @property
    def n_nodes(self):
        return <int64_t>self._adj.size()

    @property
    def n_edges(self):
        return self._n_edges

    @property
    def degree_sum(self):
        return 2 * self._n_edges

    def add_node(self):
        self._adj.push_back(vector[int32_t]())
        self._tri.push_back(0)
        return <int64_t>self._adj.size() - 1

    cdef inline void _check(self, int64_t v) except *:
        if v < 0 or v >= <int64_t>self._adj.size():
            raise IndexError(f"unknown node id {v}")

    def degree(self, int64_t v):
        self._check(v)
        return <int64_t>self._adj[v].size()

    def triangles(self, int64_t v):
        self._check(v)
        return self._tri[v]

    def neighbors(self, int64_t v):
        self._check(v)
        return [x for x in self._adj[v]]

    def has_edge(self, int64_t u, int64_t v):
        self._check(u)
        self._check(v)
        if self._adj[u].size() > self._adj[v].size():
            return _contains(self._adj[v], <int32_t>u)
        return _contains(self._adj[u], <int32_t>v)

    cdef int64_t _common(self, int32_t u, int32_t v, bint bump) noexcept nogil:
        cdef vector[int32_t]* small = &self._adj[u]
        cdef vector[int32_t]* large = &self._adj[v]
        cdef vector[int32_t]* tmp
        cdef size_t i
        cdef int32_t w
        cdef int64_t c = 0
        if small.size() > large.size():
            tmp = small
            small = large
            large = tmp
        if small.size() == 0:
            return 0
        for i in range(small.size()):
            w = small[0][i]
            if _contains(large[0], w):
                c += 1
                if bump:
                    self._tri[w] += 1
        return c

    def common_neighbor_count(self, int64_t u, int64_t v):
        self._check(u)
        self._check(v)
        return self._common(<int32_t>u, <int32_t>v, False)

    cdef int8_t _insert(self, int32_t u, int32_t v, int64_t* out) noexcept nogil:
        # out = [k_u, k_v, T_u, T_v, common, degree_sum], all pre-insertion
        cdef int64_t c
        out[0] = self._adj[u].size()
        out[1] = self._adj[v].size()
        out[2] = self._tri[u]
        out[3] = self._tri[v]
        out[4] = 0
        out[5] = 2 * self._n_edges
        if u == v:
            return SELF_LOOP
        if out[0] <= out[1]:
            if _contains(self._adj[u], v):
                return DUPLICATE
        elif _contains(self._adj[v], u):
            return DUPLICATE
        c = self._common(u, v, True)
        out[4] = c
        self._tri[u] += c
        self._tri[v] += c
        _sorted_insert(self._adj[u], v)
        _sorted_insert(self._adj[v], u)
        self._n_edges += 1
        return ADDED

    def insert(self, int64_t u, int64_t v):
        """Insert edge (u, v).

        Returns ``(status, k_u, k_v, T_u, T_v, common, degree_sum)`` with all
        counters taken before the insertion.
        """
        cdef int64_t out[6]
        self._check(u)
        self._check(v)
        cdef int8_t status = self._insert(<int32_t>u, <int32_t>v, out)
        return status, out[0], out[1], out[2], out[3], out[4], out[5]

    def insert_batch(self, us, vs):
        """Insert edges in order; returns per-event pre-insertion arrays."""
        cdef cnp.ndarray[int64_t, ndim=1] au = np.ascontiguousarray(us, dtype=np.int64)
        cdef cnp.ndarray[int64_t, ndim=1] av = np.ascontiguousarray(vs, dtype=np.int64)
        if au.shape[0] != av.shape[0]:
            raise ValueError("endpoint arrays differ in length")
        cdef Py_ssize_t n = au.shape[0]
        cdef int64_t nn = <int64_t>self._adj.size()
        if n and (min(au.min(), av.min()) < 0 or max(au.max(), av.max()) >= nn):
            raise IndexError("unknown node id in batch")
        status = np.empty(n, dtype=np.int8)
        pre = np.empty((6, n), dtype=np.int64)
        cdef int8_t[::1] st = status
        cdef int64_t[:, ::1] p = pre
        cdef int64_t out[6]
        cdef Py_ssize_t i
        cdef int j
        with nogil:
            for i in range(n):
                st[i] = self._insert(<int32_t>au[i], <int32_t>av[i], out)
                for j in range(6):
                    p[j, i] = out[j]
        return status, pre[0], pre[1], pre[2], pre[3], pre[4], pre[5]

    def degrees(self):
        cdef Py_ssize_t n = self._adj.size()
        res = np.empty(n, dtype=np.int64)
        cdef int64_t[::1] r = res
        cdef Py_ssize_t i
        for i in range(n):
            r[i] = self._adj[i].size()
        return res

    def triangle_counts(self):
        cdef Py_ssize_t n = self._tri.size()
        res = np.empty(n, dtype=np.int64)
        cdef int64_t[::1] r = res
        cdef Py_ssize_t i
        for i in range(n):
            r[i] = self._tri[i]
        return res


# -- day-file scanner ----------------------------------------------------------

from libc.string cimport memcmp, memcpy
from cpython.unicode cimport PyUnicode_DecodeUTF8
from cpython.dict cimport PyDict_GetItem
from cpython.ref cimport PyObject


cdef inline bint _blank(const unsigned char* s, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(a, b):
        if s[i] != 32 and s[i] != 9:
            return False
    return True


cdef inline bint _digit(unsigned char c) noexcept nogil:
    return 48 <= c <= 57


cdef inline int _kind(const unsigned char* s, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    # 0 CALL, 1 SMS, 2 FAX, -1 unknown; surrounding blanks ignored, ASCII case-folded
    cdef unsigned char t[4]
    cdef Py_ssize_t i
    while a < b and (s[a] == 32 or s[a] == 9):
        a += 1
    while b > a and (s[b - 1] == 32 or s[b - 1] == 9):
        b -= 1
    if b - a < 3 or b - a > 4:
        return -1
    for i in range(b - a):
        t[i] = s[a + i]
        if 97 <= t[i] <= 122:
            t[i] -= 32
    if b - a == 4:
        return 0 if memcmp(t, b"CALL", 4) == 0 else -1
    if memcmp(t, b"SMS", 3) == 0:
        return 1
    if memcmp(t, b"FAX", 3) == 0:
        return 2
    return -1


cdef inline bint _duration(const unsigned char* s, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    # [ \t]*[0-9]+(\.[0-9]+)?[ \t]*
    cdef Py_ssize_t i
    while a < b and (s[a] == 32 or s[a] == 9):
        a += 1
    while b > a and (s[b - 1] == 32 or s[b - 1] == 9):
        b -= 1
    i = a
    while i < b and _digit(s[i]):
        i += 1
    if i == a:
        return False
    if i == b:
        return True
    if s[i] != 46:
        return False
    i += 1
    if i == b:
        return False
    while i < b:
        if not _digit(s[i]):
            return False
        i += 1
    return True


cdef inline bint _date_shape(const unsigned char* s, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    cdef Py_ssize_t i
    if b - a != 10:
        return False
    for i in range(10):
        if i == 4 or i == 7:
            if s[a + i] != 45:
                return False
        elif not _digit(s[a + i]):
            return False
    return True


def scan_day(bytes data, int64_t day, dict ids, intern, valid_date):
    """Scan a whole day file already known to be valid UTF-8.

    Returns ``(u, v, kind, lines_read, malformed, fax_dropped, self_dropped)``;
    endpoints of accepted events are interned through ``intern(id, day)``.
    """
    cdef const unsigned char* s = data
    cdef Py_ssize_t n = len(data)
    cdef Py_ssize_t pos = 0, start, end, i, nf
    cdef Py_ssize_t fs[5]
    cdef Py_ssize_t fe[5]
    cdef int kind
    cdef int64_t lines_read = 0, malformed = 0, fax = 0, selfc = 0
    cdef unsigned char last_date[10]
    cdef bint have_date = False
    cdef vector[int64_t] us, vs
    cdef vector[int8_t] ks
    cdef PyObject* hit
    cdef Py_ssize_t lu, lv
    while pos <= n:
        start = pos
        end = start
        while end < n and s[end] != 10:
            end += 1
        pos = end + 1
        if end > start and s[end - 1] == 13:
            end -= 1
        if end == start and pos > n:
            break
        if _blank(s, start, end):
            continue
        lines_read += 1
        nf = 0
        fs[0] = start
        for i in range(start, end):
            if s[i] == 59:
                if nf == 4:
                    nf = 5
                    break
                fe[nf] = i
                nf += 1
                fs[nf] = i + 1
        if nf != 4:
            malformed += 1
            continue
        fe[4] = end
        kind = _kind(s, fs[3], fe[3])
        if kind < 0 or fe[1] == fs[1] or fe[2] == fs[2] or not _duration(s, fs[4], fe[4]) \
                or not _date_shape(s, fs[0], fe[0]):
            malformed += 1
            continue
        if not (have_date and memcmp(last_date, s + fs[0], 10) == 0):
            if not valid_date(data[fs[0]:fe[0]].decode("ascii")):
                malformed += 1
                continue
            memcpy(last_date, s + fs[0], 10)
            have_date = True
        if kind == 2:
            fax += 1
            continue
        lu = fe[1] - fs[1]
        lv = fe[2] - fs[2]
        if lu == lv and memcmp(s + fs[1], s + fs[2], lu) == 0:
            selfc += 1
            continue
        caller = PyUnicode_DecodeUTF8(<const char*>(s + fs[1]), lu, NULL)
        callee = PyUnicode_DecodeUTF8(<const char*>(s + fs[2]), lv, NULL)
        hit = PyDict_GetItem(ids, caller)
        us.push_back(<object>hit if hit != NULL else intern(caller, day))
        hit = PyDict_GetItem(ids, callee)
        vs.push_back(<object>hit if hit != NULL else intern(callee, day))
        ks.push_back(kind)
    cdef Py_ssize_t m = us.size()
    u = np.empty(m, dtype=np.int64)
    v = np.empty(m, dtype=np.int64)
    k = np.empty(m, dtype=np.int8)
    cdef int64_t[::1] uu = u
    cdef int64_t[::1] vv = v
    cdef int8_t[::1] kk = k
    for i in range(m):
        uu[i] = us[i]
        vv[i] = vs[i]
        kk[i] = ks[i]
    return u, v, k, lines_read, malformed, fax, selfc
