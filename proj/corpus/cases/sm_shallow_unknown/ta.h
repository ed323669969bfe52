#ifndef TA_MAILBOX_H
#define TA_MAILBOX_H

#define TA_MAILBOX_UUID { 0xd3e85a16, 0x0c47, 0x4f2b, { 0x86, 0x9a, 0x5f, 0x30, 0xe2, 0x1b, 0xc8, 0x7d } }

#define CMD_DELIVER 7

#endif
