// Run-length decoding for gridmap cell strings.

export const UNKNOWN = 0;
export const FREE = 1;
export const OCCUPIED = 2;

const VALUES: Record<string, number> = { U: UNKNOWN, F: FREE, O: OCCUPIED };

export function decodeCells(encoded: string, size: number): Uint8Array {
  const out = new Uint8Array(size);
  let i = 0;
  let pos = 0;
  while (i < encoded.length) {
    let run = 0;
    while (i < encoded.length && encoded[i] >= "0" && encoded[i] <= "9") {
      run = run * 10 + (encoded.charCodeAt(i) - 48);
      i += 1;
    }
    const value = VALUES[encoded[i]];
    if (value === undefined || run === 0) {
      throw new Error(`bad RLE at offset ${i} in ${JSON.stringify(encoded)}`);
    }
    i += 1;
    if (pos + run > size) throw new Error(`RLE overruns ${size} cells`);
    out.fill(value, pos, pos + run);
    pos += run;
  }
  if (pos !== size) throw new Error(`RLE decoded ${pos} cells, expected ${size}`);
  return out;
}
