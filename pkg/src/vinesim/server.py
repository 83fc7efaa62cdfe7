"""Socket and stdio transports for the session protocol.

One simulator session per connection, no state shared across connections.
The TCP listener sniffs the first byte of each connection: an HTTP ``GET``
gets the RFC 6455 WebSocket handshake (so browsers can connect directly),
anything else is treated as raw newline-delimited JSON.  Both transports
carry exactly the same messages.
"""
from __future__ import annotations

import base64
import hashlib
import socket
import struct
import sys
import threading

from .kinematics import DEFAULT_SAMPLES_PER_MM
from .protocol import SessionHandler
from .simulation import DEFAULT_PRESSURE_KPA, DesignParams

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
_RECV_SIZE = 65536


def serve_stdio(
    design: DesignParams | None = None,
    pressure: float = DEFAULT_PRESSURE_KPA,
    disturbance: bool = False,
    samples_per_mm: float = DEFAULT_SAMPLES_PER_MM,
    stdin=None,
    stdout=None,
) -> None:
    """Speak the protocol over standard input/output, one JSON per line."""
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    session = SessionHandler(design, pressure, disturbance, samples_per_mm)
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        stdout.write(session.handle_line(line) + "\n")
        stdout.flush()


class ProtocolServer:
    """Threaded TCP server; each accepted connection runs its own session."""

    def __init__(
        self,
        design: DesignParams | None = None,
        pressure: float = DEFAULT_PRESSURE_KPA,
        host: str = "127.0.0.1",
        port: int = 0,
        disturbance: bool = False,
        samples_per_mm: float = DEFAULT_SAMPLES_PER_MM,
    ):
        self.design = design if design is not None else DesignParams()
        self.pressure = pressure
        self.disturbance = disturbance
        self.samples_per_mm = samples_per_mm
        self.host = host
        self._requested_port = port
        self._sock: socket.socket | None = None
        self._accept_thread: threading.Thread | None = None
        self._closing = threading.Event()

    @property
    def port(self) -> int:
        if self._sock is None:
            raise RuntimeError("server is not started")
        return self._sock.getsockname()[1]

    def start(self) -> None:
        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        sock.bind((self.host, self._requested_port))
        sock.listen(8)
        sock.settimeout(0.2)
        self._sock = sock
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()

    def serve_forever(self) -> None:
        if self._sock is None:
            self.start()
        try:
            while not self._closing.is_set():
                self._closing.wait(0.5)
        except KeyboardInterrupt:
            pass
        finally:
            self.close()

    def close(self) -> None:
        self._closing.set()
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass
        if self._accept_thread is not None:
            self._accept_thread.join(timeout=2.0)

    # ------------------------------------------------------------------
    # connection handling

    def _accept_loop(self) -> None:
        assert self._sock is not None
        while not self._closing.is_set():
            try:
                conn, _ = self._sock.accept()
            except socket.timeout:
                continue
            except OSError:
                break
            thread = threading.Thread(
                target=self._handle_connection, args=(conn,), daemon=True
            )
            thread.start()

    def _new_session(self) -> SessionHandler:
        return SessionHandler(
            self.design, self.pressure, self.disturbance, self.samples_per_mm
        )

    def _handle_connection(self, conn: socket.socket) -> None:
        try:
            conn.settimeout(None)
            first = conn.recv(1, socket.MSG_PEEK)
            if not first:
                return
            if first == b"G":
                self._serve_websocket(conn)
            else:
                self._serve_lines(conn)
        except (OSError, ConnectionError):
            pass
        finally:
            try:
                conn.close()
            except OSError:
                pass

    def _serve_lines(self, conn: socket.socket) -> None:
        session = self._new_session()
        buffer = b""
        while True:
            chunk = conn.recv(_RECV_SIZE)
            if not chunk:
                return
            buffer += chunk
            while b"\n" in buffer:
                line, buffer = buffer.split(b"\n", 1)
                text = line.decode("utf-8", errors="replace").strip()
                if not text:
                    continue
                reply = session.handle_line(text)
                conn.sendall(reply.encode("utf-8") + b"\n")

    # ------------------------------------------------------------------
    # WebSocket transport

    def _serve_websocket(self, conn: socket.socket) -> None:
        request = _read_until(conn, b"\r\n\r\n")
        if request is None:
            return
        key = _websocket_key(request)
        if key is None:
            conn.sendall(b"HTTP/1.1 400 Bad Request\r\n\r\n")
            return
        accept = base64.b64encode(
            hashlib.sha1((key + _WS_GUID).encode("ascii")).digest()
        ).decode("ascii")
        conn.sendall(
            b"HTTP/1.1 101 Switching Protocols\r\n"
            b"Upgrade: websocket\r\n"
            b"Connection: Upgrade\r\n"
            b"Sec-WebSocket-Accept: " + accept.encode("ascii") + b"\r\n\r\n"
        )
        session = self._new_session()
        fragments: list[bytes] = []
        while True:
            frame = _read_frame(conn)
            if frame is None:
                return
            fin, opcode, payload = frame
            if opcode == 0x8:
                conn.sendall(_encode_frame(0x8, payload[:2]))
                return
            if opcode == 0x9:
                conn.sendall(_encode_frame(0xA, payload))
                continue
            if opcode == 0xA:
                continue
            if opcode in (0x0, 0x1, 0x2):
                fragments.append(payload)
                if not fin:
                    continue
                text = b"".join(fragments).decode("utf-8", errors="replace")
                fragments = []
                for line in text.split("\n"):
                    line = line.strip()
                    if not line:
                        continue
                    reply = session.handle_line(line)
                    conn.sendall(_encode_frame(0x1, reply.encode("utf-8")))


def _read_until(conn: socket.socket, marker: bytes, limit: int = 65536):
    data = b""
    while marker not in data:
        if len(data) > limit:
            return None
        chunk = conn.recv(_RECV_SIZE)
        if not chunk:
            return None
        data += chunk
    return data


def _websocket_key(request: bytes):
    try:
        head = request.split(b"\r\n\r\n", 1)[0].decode("latin-1")
    except UnicodeDecodeError:
        return None
    upgrade_seen = False
    key = None
    for line in head.split("\r\n")[1:]:
        if ":" not in line:
            continue
        name, value = line.split(":", 1)
        name = name.strip().lower()
        value = value.strip()
        if name == "upgrade" and value.lower() == "websocket":
            upgrade_seen = True
        elif name == "sec-websocket-key":
            key = value
    return key if upgrade_seen else None


def _read_exact(conn: socket.socket, n: int):
    data = b""
    while len(data) < n:
        chunk = conn.recv(n - len(data))
        if not chunk:
            return None
        data += chunk
    return data


def _read_frame(conn: socket.socket):
    head = _read_exact(conn, 2)
    if head is None:
        return None
    fin = bool(head[0] & 0x80)
    opcode = head[0] & 0x0F
    masked = bool(head[1] & 0x80)
    length = head[1] & 0x7F
    if length == 126:
        ext = _read_exact(conn, 2)
        if ext is None:
            return None
        length = struct.unpack(">H", ext)[0]
    elif length == 127:
        ext = _read_exact(conn, 8)
        if ext is None:
            return None
        length = struct.unpack(">Q", ext)[0]
    mask = b""
    if masked:
        mask = _read_exact(conn, 4)
        if mask is None:
            return None
    payload = _read_exact(conn, length) if length else b""
    if payload is None:
        return None
    if masked and payload:
        payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
    return fin, opcode, payload


def _encode_frame(opcode: int, payload: bytes) -> bytes:
    head = bytes([0x80 | opcode])
    n = len(payload)
    if n < 126:
        head += bytes([n])
    elif n < 65536:
        head += bytes([126]) + struct.pack(">H", n)
    else:
        head += bytes([127]) + struct.pack(">Q", n)
    return head + payload
