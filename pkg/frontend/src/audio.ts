// Browser microphone capture. Starts/stops with the server's recording state;
// resamples to the pinned wire format client-side and sends sequential chunks.

import { SessionConnection } from "./connection";
import { ChunkAssembler, floatToPcm16, resampleTo16k } from "./resample";

export class MicrophoneCapture {
  private connection: SessionConnection;
  private context: AudioContext | null = null;
  private stream: MediaStream | null = null;
  private processor: ScriptProcessorNode | null = null;
  private assembler = new ChunkAssembler(100);
  private seq = 0;
  running = false;
  unavailable = false;

  constructor(connection: SessionConnection) {
    this.connection = connection;
  }

  async start(): Promise<void> {
    if (this.running || this.unavailable) return;
    if (!navigator.mediaDevices?.getUserMedia) {
      this.unavailable = true;
      return;
    }
    try {
      this.stream = await navigator.mediaDevices.getUserMedia({ audio: true });
    } catch {
      this.unavailable = true; // mic denied: sessions still work, just silent
      return;
    }
    this.context = new AudioContext();
    const source = this.context.createMediaStreamSource(this.stream);
    // ScriptProcessor is deprecated but universally available; 4096 frames
    // keeps callback rate low and latency well under the 200 ms chunk cap.
    this.processor = this.context.createScriptProcessor(4096, 1, 1);
    const rate = this.context.sampleRate;
    this.processor.onaudioprocess = (ev) => {
      if (!this.running) return;
      const pcm = floatToPcm16(resampleTo16k(ev.inputBuffer.getChannelData(0), rate));
      for (const chunk of this.assembler.push(pcm)) {
        this.connection.sendAudio(this.seq++, chunk);
      }
    };
    source.connect(this.processor);
    this.processor.connect(this.context.destination);
    this.seq = 0;
    this.assembler = new ChunkAssembler(100);
    this.running = true;
  }

  // the server restarts chunk numbering when a segment aborts (gap or
  // broken stream); mirror it so the next chunk is accepted
  resetSequence(): void {
    this.seq = 0;
    this.assembler = new ChunkAssembler(100);
  }

  stop(): void {
    if (!this.running) return;
    this.running = false;
    const rest = this.assembler.flush();
    if (rest && rest.length > 0) this.connection.sendAudio(this.seq++, rest);
    this.processor?.disconnect();
    this.stream?.getTracks().forEach((t) => t.stop());
    this.context?.close();
    this.processor = null;
    this.stream = null;
    this.context = null;
  }
}
