#ifndef TA_KEYSTORE_H
#define TA_KEYSTORE_H

#define TA_KEYSTORE_UUID { 0x1c4a7d02, 0x93f1, 0x4b2e, { 0x8a, 0x61, 0x3d, 0x0c, 0x5e, 0x77, 0x19, 0xa4 } }

#define CMD_EXPORT_KEY 1
#define CMD_ROTATE 2

#endif
