"""Share files, the wire protocol, and in-process/socket transports.

Frames are ``u32le length | u8 type | payload`` with length counting the
type byte and payload.  Query points travel as m-1 coordinates only (the
server injects its own hyperplane coordinate), which makes the protocol's
bit accounting directly measurable; symbols occupy ceil(log2(q)/8) bytes
little-endian.  The in-process transport pushes the same bytes through
the same codecs as the socket one, so traffic counts agree exactly.
"""

from __future__ import annotations

import math
import os
import random
import socket
import socketserver
import struct
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .field import make_field
from .multcode import CodeParams, EvalTuple, Point, Share, make_params
from .pir import ByzantineMode, QueryPlan, answer, corrupt_answers, ProtocolError

MAGIC = b"MPIR1"
MSG_QUERY = 0x01
MSG_ANSWER = 0x02
MSG_ERROR = 0x03
MSG_PING = 0x04
MAX_FRAME = 16 * 1024 * 1024
FRAME_OVERHEAD = 5  # u32 length + u8 type


class TransportError(RuntimeError):
    """A server could not be reached or answered with an error."""


def _timeout_s() -> float:
    return int(os.environ.get("MPIR_TIMEOUT_MS", "5000")) / 1000.0


def symbol_bytes(q: int) -> int:
    return ((q - 1).bit_length() + 7) // 8


# -- share files -----------------------------------------------------------


def write_share(path: str, share: Share) -> None:
    params = share.params
    fld = params.field
    nb = symbol_bytes(params.q)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<HH", fld.p, fld.e))
        fh.write(bytes(fld.modulus))
        fh.write(struct.pack("<HHHH", params.m, params.s, params.d, share.index))
        for sym in share.symbols:
            for v in sym:
                fh.write(v.to_bytes(nb, "little"))


def read_share(path: str, expected: CodeParams | None = None) -> Share:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:5] != MAGIC:
        raise ValueError(f"{path}: bad magic {data[:5]!r}")
    off = 5
    p, e = struct.unpack_from("<HH", data, off)
    off += 4
    modulus = tuple(data[off : off + e + 1])
    off += e + 1
    m, s, d, ell = struct.unpack_from("<HHHH", data, off)
    off += 8
    fld = make_field(p, e)
    if fld.modulus != modulus:
        raise ValueError(f"{path}: modulus {modulus} does not match GF({p}^{e})")
    params = make_params(fld, m, s, d)
    if expected is not None and params != expected:
        raise ValueError(f"{path}: header parameters do not match expected code")
    if ell >= params.q:
        raise ValueError(f"{path}: hyperplane index {ell} out of range")
    nb = symbol_bytes(params.q)
    want = params.points_per_share * params.sigma * nb
    body = data[off:]
    if len(body) != want:
        raise ValueError(f"{path}: expected {want} symbol bytes, found {len(body)}")
    symbols = []
    pos = 0
    for _ in range(params.points_per_share):
        sym = []
        for _ in range(params.sigma):
            v = int.from_bytes(body[pos : pos + nb], "little")
            fld.check_element(v)
            sym.append(v)
            pos += nb
        symbols.append(tuple(sym))
    return Share(params, ell, symbols)


# -- wire codec -------------------------------------------------------------


def encode_frame(msg_type: int, payload: bytes) -> bytes:
    return struct.pack("<IB", len(payload) + 1, msg_type) + payload


def encode_query(params: CodeParams, points: list[Point]) -> bytes:
    nb = symbol_bytes(params.q)
    out = bytearray(struct.pack("<H", len(points)))
    for pt in points:
        for x in pt[:-1]:
            out += x.to_bytes(nb, "little")
    return bytes(out)


def decode_query(params: CodeParams, ell: int, payload: bytes) -> list[Point]:
    nb = symbol_bytes(params.q)
    if len(payload) < 2:
        raise ProtocolError("query payload truncated")
    (count,) = struct.unpack_from("<H", payload, 0)
    want = 2 + count * (params.m - 1) * nb
    if len(payload) != want:
        raise ProtocolError(f"query payload has {len(payload)} bytes, expected {want}")
    pts = []
    off = 2
    for _ in range(count):
        coords = []
        for _ in range(params.m - 1):
            v = int.from_bytes(payload[off : off + nb], "little")
            params.field.check_element(v)
            coords.append(v)
            off += nb
        coords.append(ell)
        pts.append(tuple(coords))
    return pts


def encode_answer(params: CodeParams, tuples: list[EvalTuple]) -> bytes:
    nb = symbol_bytes(params.q)
    out = bytearray()
    for t in tuples:
        for v in t:
            out += v.to_bytes(nb, "little")
    return bytes(out)


def decode_answer(params: CodeParams, payload: bytes) -> list[EvalTuple]:
    nb = symbol_bytes(params.q)
    want = params.sigma * params.sigma * nb
    if len(payload) != want:
        raise TransportError(f"answer payload has {len(payload)} bytes, expected {want}")
    out = []
    off = 0
    for _ in range(params.sigma):
        t = []
        for _ in range(params.sigma):
            v = int.from_bytes(payload[off : off + nb], "little")
            params.field.check_element(v)
            t.append(v)
            off += nb
        out.append(tuple(t))
    return out


# -- traffic accounting ------------------------------------------------------


@dataclass
class TrafficReport:
    """Symbols and bytes moved by one retrieval.

    Info bits value symbols at log2(q) bits apiece, the granularity the
    overhead formulas use; wire bytes include whole-byte symbol storage
    and the 5-byte frame headers.
    """

    q: int
    uplink_symbols: int = 0
    downlink_symbols: int = 0
    uplink_wire_bytes: int = 0
    downlink_wire_bytes: int = 0

    @property
    def uplink_info_bits(self) -> float:
        return self.uplink_symbols * math.log2(self.q)

    @property
    def downlink_info_bits(self) -> float:
        return self.downlink_symbols * math.log2(self.q)

    @property
    def total_info_bits(self) -> float:
        return self.uplink_info_bits + self.downlink_info_bits


# -- servers -----------------------------------------------------------------


class ShareServer:
    """Answering logic for one share, with optional fault injection."""

    def __init__(
        self,
        share: Share,
        byzantine: ByzantineMode = ByzantineMode.HONEST,
        seed: int | None = None,
    ):
        self.share = share
        self.byzantine = byzantine
        self._rng = random.Random(seed)

    def handle_points(self, points: list[Point]) -> list[EvalTuple]:
        honest = answer(self.share, points)
        return corrupt_answers(self.share.params, honest, self.byzantine, self._rng)

    def handle_frame(self, msg_type: int, payload: bytes) -> tuple[int, bytes]:
        params = self.share.params
        if msg_type == MSG_PING:
            return MSG_PING, payload
        if msg_type != MSG_QUERY:
            return MSG_ERROR, f"unsupported message type {msg_type:#x}".encode()
        try:
            points = decode_query(params, self.share.index, payload)
            tuples = self.handle_points(points)
        except (ProtocolError, ValueError) as err:
            return MSG_ERROR, str(err).encode()
        return MSG_ANSWER, encode_answer(params, tuples)


class InProcessTransport:
    """Byte-faithful loopback transport over a list of ShareServers."""

    def __init__(self, servers: list[ShareServer]):
        self.servers = servers

    def fanout(self, plan: QueryPlan) -> tuple[list[list[EvalTuple]], TrafficReport]:
        params = plan.params
        if len(self.servers) != params.q:
            raise TransportError(f"need {params.q} servers, have {len(self.servers)}")
        report = TrafficReport(q=params.q)
        answers = []
        for ell, server in enumerate(self.servers):
            payload = encode_query(params, plan.batches[ell])
            report.uplink_symbols += params.sigma * (params.m - 1)
            report.uplink_wire_bytes += FRAME_OVERHEAD + len(payload)
            rtype, rpayload = server.handle_frame(MSG_QUERY, payload)
            if rtype == MSG_ERROR:
                raise TransportError(f"server {ell}: {rpayload.decode()}")
            report.downlink_symbols += params.sigma * params.sigma
            report.downlink_wire_bytes += FRAME_OVERHEAD + len(rpayload)
            answers.append(decode_answer(params, rpayload))
        return answers, report


# -- sockets -------------------------------------------------------------------


def _read_frame(sock: socket.socket) -> tuple[int, bytes]:
    header = _read_exact(sock, 4)
    (length,) = struct.unpack("<I", header)
    if length < 1 or length > MAX_FRAME:
        raise TransportError(f"invalid frame length {length}")
    body = _read_exact(sock, length)
    return body[0], body[1:]


def _read_exact(sock: socket.socket, count: int) -> bytes:
    buf = bytearray()
    while len(buf) < count:
        chunk = sock.recv(count - len(buf))
        if not chunk:
            raise TransportError("connection closed mid-frame")
        buf += chunk
    return bytes(buf)


class _Handler(socketserver.BaseRequestHandler):
    def setup(self):
        self.request.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)

    def handle(self):
        server: ShareTCPServer = self.server  # type: ignore[assignment]
        sock = self.request
        while True:
            try:
                header = _read_exact(sock, 4)
            except TransportError:
                return
            (length,) = struct.unpack("<I", header)
            if length < 1 or length > MAX_FRAME:
                sock.sendall(encode_frame(MSG_ERROR, b"oversized or empty frame"))
                return
            body = _read_exact(sock, length)
            rtype, rpayload = server.logic.handle_frame(body[0], body[1:])
            sock.sendall(encode_frame(rtype, rpayload))


class ShareTCPServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, addr: tuple[str, int], logic: ShareServer):
        super().__init__(addr, _Handler)
        self.logic = logic


def serve(
    host: str,
    port: int,
    share: Share,
    byzantine: ByzantineMode = ByzantineMode.HONEST,
    seed: int | None = None,
) -> ShareTCPServer:
    """Start a share server in a background thread; caller shuts it down."""
    srv = ShareTCPServer((host, port), ShareServer(share, byzantine, seed))
    thread = threading.Thread(
        target=lambda: srv.serve_forever(poll_interval=0.05), daemon=True
    )
    thread.start()
    return srv


@dataclass
class Endpoint:
    index: int
    host: str
    port: int


class SocketTransport:
    """Client side: fan a query plan out to q share servers over TCP.

    Connections are opened lazily and kept alive across retrievals; one
    in-flight request per server at a time.
    """

    def __init__(self, endpoints: list[Endpoint]):
        by_index = {ep.index: ep for ep in endpoints}
        self.endpoints = by_index
        self._socks: dict[int, socket.socket] = {}
        self._locks = {idx: threading.Lock() for idx in by_index}
        self._pool: ThreadPoolExecutor | None = None

    def close(self):
        if self._pool is not None:
            self._pool.shutdown(wait=False)
            self._pool = None
        for sock in self._socks.values():
            try:
                sock.close()
            except OSError:
                pass
        self._socks.clear()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _sock_for(self, ep: Endpoint) -> socket.socket:
        sock = self._socks.get(ep.index)
        if sock is None:
            sock = socket.create_connection((ep.host, ep.port), timeout=_timeout_s())
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            self._socks[ep.index] = sock
        return sock

    def _request(self, ep: Endpoint, msg_type: int, payload: bytes) -> tuple[int, bytes]:
        with self._locks[ep.index]:
            try:
                sock = self._sock_for(ep)
                sock.sendall(encode_frame(msg_type, payload))
                return _read_frame(sock)
            except (OSError, TransportError) as err:
                self._socks.pop(ep.index, None)
                raise TransportError(
                    f"server {ep.index} at {ep.host}:{ep.port}: {err}"
                ) from err

    def _exchange(self, ep: Endpoint, payload: bytes) -> bytes:
        rtype, rpayload = self._request(ep, MSG_QUERY, payload)
        if rtype == MSG_ERROR:
            raise TransportError(f"server {ep.index}: {rpayload.decode()}")
        if rtype != MSG_ANSWER:
            raise TransportError(f"server {ep.index}: unexpected reply type {rtype:#x}")
        return rpayload

    def ping(self, index: int) -> bool:
        rtype, _ = self._request(self.endpoints[index], MSG_PING, b"")
        return rtype == MSG_PING

    def fanout(self, plan: QueryPlan) -> tuple[list[list[EvalTuple]], TrafficReport]:
        params = plan.params
        missing = [ell for ell in range(params.q) if ell not in self.endpoints]
        if missing:
            raise TransportError(f"no endpoint for servers {missing}")
        if self._pool is None:
            self._pool = ThreadPoolExecutor(max_workers=len(self.endpoints))
        report = TrafficReport(q=params.q)

        def run(ell: int):
            payload = encode_query(params, plan.batches[ell])
            rpayload = self._exchange(self.endpoints[ell], payload)
            return decode_answer(params, rpayload), len(payload), len(rpayload)

        futures = {ell: self._pool.submit(run, ell) for ell in range(params.q)}
        answers: list = [None] * params.q
        errors: dict[int, Exception] = {}
        for ell, fut in futures.items():
            try:
                answers[ell], up, down = fut.result()
            except Exception as err:  # noqa: BLE001 - reported per endpoint
                errors[ell] = err
                continue
            report.uplink_symbols += params.sigma * (params.m - 1)
            report.uplink_wire_bytes += FRAME_OVERHEAD + up
            report.downlink_symbols += params.sigma * params.sigma
            report.downlink_wire_bytes += FRAME_OVERHEAD + down
        if errors:
            detail = "; ".join(f"server {ell}: {err}" for ell, err in sorted(errors.items()))
            raise TransportError(f"retrieval aborted, missing answers ({detail})")
        return answers, report
