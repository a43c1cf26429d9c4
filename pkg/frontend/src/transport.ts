// Duplex transports for the newline-delimited JSON protocol.
//
// The browser talks WebSocket (one JSON object per text frame, matching
// the service's --ws mode); tests and headless tooling use a raw TCP
// socket with LF framing. Both expose the same minimal surface.

export interface Transport {
    send(line: string): void;
    close(): void;
    onMessage(handler: (raw: string) => void): void;
    onClose(handler: () => void): void;
    onOpen(handler: () => void): void;
}

export class WebSocketTransport implements Transport {
    private ws: WebSocket;
    private messageHandler: (raw: string) => void = () => {};
    private closeHandler: () => void = () => {};
    private openHandler: () => void = () => {};

    constructor(url: string) {
        this.ws = new WebSocket(url);
        this.ws.onmessage = (ev) => this.messageHandler(String(ev.data));
        this.ws.onclose = () => this.closeHandler();
        this.ws.onerror = () => this.ws.close();
        this.ws.onopen = () => this.openHandler();
    }

    send(line: string): void {
        this.ws.send(line);
    }

    close(): void {
        this.ws.close();
    }

    onMessage(handler: (raw: string) => void): void {
        this.messageHandler = handler;
    }

    onClose(handler: () => void): void {
        this.closeHandler = handler;
    }

    onOpen(handler: () => void): void {
        this.openHandler = handler;
    }
}

/** Node-only TCP transport; used by the headless protocol tests. */
export class TcpTransport implements Transport {
    private socket: import("node:net").Socket | null = null;
    private buffer = "";
    private messageHandler: (raw: string) => void = () => {};
    private closeHandler: () => void = () => {};
    private openHandler: () => void = () => {};

    constructor(private host: string, private port: number) {
        void this.connect();
    }

    private async connect(): Promise<void> {
        const net = await import("node:net");
        const socket = net.createConnection({ host: this.host, port: this.port });
        this.socket = socket;
        socket.setEncoding("utf8");
        socket.on("connect", () => this.openHandler());
        socket.on("data", (chunk: string) => {
            this.buffer += chunk;
            let idx;
            while ((idx = this.buffer.indexOf("\n")) >= 0) {
                const line = this.buffer.slice(0, idx);
                this.buffer = this.buffer.slice(idx + 1);
                if (line.trim()) this.messageHandler(line);
            }
        });
        socket.on("close", () => this.closeHandler());
        socket.on("error", () => socket.destroy());
    }

    send(line: string): void {
        this.socket?.write(line + "\n");
    }

    close(): void {
        this.socket?.end();
    }

    onMessage(handler: (raw: string) => void): void {
        this.messageHandler = handler;
    }

    onClose(handler: () => void): void {
        this.closeHandler = handler;
    }

    onOpen(handler: () => void): void {
        this.openHandler = handler;
    }
}
